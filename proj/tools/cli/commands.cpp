#include "cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "qleague/analytic.hpp"
#include "qleague/calibrate.hpp"
#include "qleague/config.hpp"
#include "qleague/csv.hpp"
#include "qleague/error.hpp"
#include "qleague/scheduling.hpp"
#include "qleague/simulate.hpp"
#include "qleague/stats.hpp"

namespace qleague::cli {
namespace {

using csv::format;
using csv::Row;

struct Context {
  const RunConfig& c;
  std::ostream& out;
  std::ostream& err;
};

std::string fixed(double v, int digits = 6) {
  std::ostringstream os;
  os << std::setprecision(digits) << v;
  return os.str();
}

void write_csv(const std::string& path, const Row& header, const std::vector<Row>& rows) {
  if (path.empty()) return;
  csv::AtomicWriter w(path);
  w.row(header);
  for (const Row& r : rows) w.row(r);
  w.commit();
}

QuenchedEnvironment environment(const Context& ctx) {
  const RunConfig& c = ctx.c;
  if (c.env_in.empty()) return draw_environment(c.mu, static_cast<int>(c.two_n), c.s, *c.seed);
  const auto rows = csv::read(c.env_in);
  if (rows.size() < 3 || rows[0] != Row{"team_index", "strength"})
    throw ConfigError("run.env_in: expected header team_index,strength and at least two teams");
  std::vector<double> strengths(rows.size() - 1, -1.0);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    std::size_t idx = 0;
    double v = 0.0;
    try {
      idx = std::stoul(rows[r].at(0));
      v = std::stod(rows[r].at(1));
    } catch (const std::exception&) {
      throw ConfigError("run.env_in: malformed row " + std::to_string(r + 1));
    }
    if (idx >= strengths.size() || strengths[idx] >= 0.0)
      throw ConfigError("run.env_in: team indices must be 0..2n-1, each once");
    strengths[idx] = v;
  }
  const double s = strengths.front();
  strengths.erase(strengths.begin());
  if (static_cast<long>(strengths.size()) + 1 != c.two_n || s != c.s)
    ctx.err << "note: run.env_in overrides two_n and s (two_n=" << strengths.size() + 1
            << ", s=" << format(s) << ")\n";
  return make_environment(std::move(strengths), s, c.mu, *c.seed);
}

void export_environment(const Context& ctx, const QuenchedEnvironment& env) {
  if (ctx.c.env_out.empty()) return;
  std::vector<Row> rows = {{"0", format(env.focal_strength)}};
  for (std::size_t j = 0; j < env.strengths.size(); ++j)
    rows.push_back({std::to_string(j + 1), format(env.strengths[j])});
  write_csv(ctx.c.env_out, {"team_index", "strength"}, rows);
}

void export_calendar(const Context& ctx, int two_n) {
  if (ctx.c.calendar_out.empty()) return;
  const Calendar cal =
      ctx.c.calendar == "canonical" ? canonical_focal_calendar(two_n) : circle_calendar(two_n);
  std::ostringstream os;
  cal.write_csv(os);
  csv::write_atomic(ctx.c.calendar_out, os.str());
}

int cmd_simulate(const Context& ctx) {
  const RunConfig& c = ctx.c;
  const QuenchedEnvironment env = environment(ctx);
  export_environment(ctx, env);
  export_calendar(ctx, env.two_n);
  const SimMode mode = c.mode == "full" ? SimMode::full : SimMode::focal;
  const auto results = run_replicas(env, c.process, c.win, static_cast<std::size_t>(c.replicas),
                                    mode, c.threads);
  std::vector<Row> rows;
  double mean = 0.0;
  for (std::size_t r = 0; r < results.size(); ++r) {
    mean += results[r].wins_focal;
    if (mode == SimMode::focal) {
      rows.push_back({std::to_string(r), std::to_string(results[r].wins_focal)});
    } else {
      for (std::size_t t = 0; t < results[r].wins_all.size(); ++t)
        rows.push_back({std::to_string(r), std::to_string(t), std::to_string(results[r].wins_all[t])});
    }
  }
  if (mode == SimMode::focal) write_csv(c.output, {"replica", "wins"}, rows);
  else write_csv(c.output, {"replica", "team_index", "wins"}, rows);
  mean /= static_cast<double>(results.size());
  const double expected = expected_wins_quenched(env, c.process.marginal(), c.win, c.tol);
  ctx.out << "simulate: " << results.size() << " replicas, 2n=" << env.two_n
          << ", s=" << format(env.focal_strength) << "\n"
          << "  mean focal wins     " << fixed(mean) << "\n"
          << "  quenched expectation " << fixed(expected) << "\n";
  return kPass;
}

int cmd_analytic_curve(const Context& ctx) {
  const RunConfig& c = ctx.c;
  const long steps = std::lround((c.s_max - c.s_min) / c.s_step);
  std::vector<Row> rows;
  for (long i = 0; i <= steps; ++i) {
    const double s = c.s_min + static_cast<double>(i) * c.s_step;
    const LimitReport r = limit_report(c.win, c.process, c.mu, s, c.tol);
    rows.push_back({format(s), format(r.ell), format(r.sigma2), format(r.rho2),
                    format(r.total_var()), format(r.rho2_truncation_bound)});
  }
  write_csv(c.output, {"s", "ell", "sigma2", "rho2", "total_var", "trunc_bound"}, rows);
  ctx.out << "analytic-curve: " << rows.size() << " grid points in [" << format(c.s_min) << ", "
          << format(c.s_max) << "]\n";
  for (const Row& r : rows)
    ctx.out << "  s=" << r[0] << "  ell=" << r[1] << "  sigma2=" << r[2] << "  rho2=" << r[3] << "\n";
  return kPass;
}

int cmd_validate_lln(const Context& ctx) {
  const RunConfig& c = ctx.c;
  const QuenchedEnvironment env = environment(ctx);
  const auto results = run_replicas(env, c.process, c.win, static_cast<std::size_t>(c.replicas),
                                    SimMode::focal, c.threads);
  std::vector<Row> rows;
  double mean = 0.0;
  for (std::size_t r = 0; r < results.size(); ++r) {
    rows.push_back({std::to_string(r), std::to_string(results[r].wins_focal)});
    mean += static_cast<double>(results[r].wins_focal) / env.two_n;
  }
  mean /= static_cast<double>(results.size());
  write_csv(c.output, {"replica", "wins"}, rows);
  const double target = ell(c.win, c.process.marginal(), c.mu, env.focal_strength, c.tol);
  const bool pass = std::abs(mean - target) <= c.lln_tol;
  ctx.out << "validate-lln: mean(W/2n)=" << fixed(mean) << "  ell(s)=" << fixed(target)
          << "  |diff|=" << fixed(std::abs(mean - target)) << "  tol=" << format(c.lln_tol)
          << "  " << (pass ? "PASS" : "FAIL") << "\n";
  return pass ? kPass : kStatFail;
}

void report_normality(const Context& ctx, const std::string& label, const NormalityReport& r,
                      double rho2) {
  write_csv(ctx.c.output,
            {"sample_size", "sample_mean", "sample_var", "target_var", "ks_statistic",
             "ks_threshold", "var_tol", "ks_pass", "var_pass", "pass"},
            {{std::to_string(r.sample_size), format(r.sample_mean), format(r.sample_var),
              format(r.target_var), format(r.ks_statistic), format(r.ks_threshold),
              format(r.var_tol), r.ks_pass ? "1" : "0", r.var_pass ? "1" : "0", r.pass ? "1" : "0"}});
  ctx.out << label << ": N=" << r.sample_size << "\n"
          << "  sample mean   " << fixed(r.sample_mean) << "\n"
          << "  sample var    " << fixed(r.sample_var) << "  target " << fixed(r.target_var)
          << "  (rho2 " << fixed(rho2) << ")\n"
          << "  KS            " << fixed(r.ks_statistic) << "  threshold " << fixed(r.ks_threshold)
          << "\n"
          << "  " << (r.degenerate ? "degenerate " : "") << (r.pass ? "PASS" : "FAIL") << "\n";
}

int cmd_validate_clt(const Context& ctx) {
  const RunConfig& c = ctx.c;
  const QuenchedEnvironment env = environment(ctx);
  const LimitReport report = limit_report(c.win, c.process, c.mu, env.focal_strength, c.tol);
  CltOptions options;
  options.seed = *c.seed;
  options.threads = c.threads;
  options.var_tol = c.var_tol;
  options.tol = c.tol;
  const NormalityReport r =
      clt_check_wins(env, c.process, c.win, static_cast<std::size_t>(c.replicas), report, options);
  report_normality(ctx, "validate-clt", r, report.rho2);
  return r.pass ? kPass : kStatFail;
}

int cmd_validate_gsum(const Context& ctx) {
  const RunConfig& c = ctx.c;
  const QuenchedEnvironment env = environment(ctx);
  const BoundedKernel g = win_kernel(c.win, c.process.marginal(), c.gsum_s, c.tol);
  CltOptions options;
  options.seed = *c.seed;
  options.threads = c.threads;
  options.var_tol = c.var_tol;
  options.tol = c.tol;
  const GsumCheck check = clt_check_gsum(g, c.process, c.mu, env.strengths,
                                         static_cast<std::size_t>(c.replicas), options);
  report_normality(ctx, "validate-gsum", check.normality, check.rho2);
  return check.normality.pass ? kPass : kStatFail;
}

int cmd_ranking(const Context& ctx) {
  const RunConfig& c = ctx.c;
  const int two_n = static_cast<int>(c.two_n);
  export_calendar(ctx, two_n);
  const auto curve = ranking_curve(c.mu, two_n, c.process, c.win,
                                   static_cast<std::size_t>(c.replicas), *c.seed,
                                   c.calendar == "canonical" ? CalendarKind::canonical
                                                             : CalendarKind::circle,
                                   c.threads);
  const Measure nu = c.process.marginal();
  std::vector<Row> rows;
  std::vector<double> observed, predicted;
  for (const RankingEntry& e : curve) {
    const double x = (static_cast<double>(e.rank_index) + 0.5) / two_n;
    const double p = ell(c.win, nu, c.mu, c.mu.inverse_cdf(x), c.tol);
    observed.push_back(e.mean_win_fraction);
    predicted.push_back(p);
    rows.push_back({std::to_string(e.rank_index), format(e.strength), format(e.mean_win_fraction),
                    format(p)});
  }
  write_csv(c.output, {"rank_index", "strength", "mean_win_fraction", "predicted_ell"}, rows);
  const double dist = sup_distance(observed, predicted);
  const bool pass = dist <= c.ranking_tol;
  ctx.out << "ranking: 2n=" << two_n << ", " << c.replicas << " full-league replicas, "
          << c.calendar << " calendar\n"
          << "  sup |curve - ell(H^-1)| = " << fixed(dist) << "  tol=" << format(c.ranking_tol)
          << "  " << (pass ? "PASS" : "FAIL") << "\n";
  return pass ? kPass : kStatFail;
}

int cmd_mixing(const Context& ctx) {
  const RunConfig& c = ctx.c;
  std::vector<Row> rows;
  const MarkovTilting* chain = c.process.markov();
  for (long n = 1; n <= c.max_lag; ++n) {
    const auto un = static_cast<unsigned>(n);
    const double bound = chain ? chain->alpha_tail_bound(un) : 0.0;
    rows.push_back({std::to_string(n), format(c.process.alpha(un)), format(bound)});
  }
  write_csv(c.output, {"n", "alpha", "tail_bound"}, rows);
  ctx.out << "mixing: " << (chain ? "finite-state Markov chain" : "i.i.d. tilting") << "\n";
  if (chain)
    ctx.out << "  second eigenvalue modulus " << fixed(chain->second_eigenvalue_modulus()) << "\n"
            << "  envelope constant         " << fixed(chain->envelope_constant()) << "\n";
  for (const Row& r : rows) ctx.out << "  alpha(" << r[0] << ") = " << r[1] << "\n";
  return kPass;
}

int cmd_blocks(const Context& ctx) {
  const RunConfig& c = ctx.c;
  const TiltingProcess& proc = c.process;
  const BlockReport rep = check_block_conditions(
      [&](unsigned n) { return proc.alpha(n); }, BlockSchedule::defaults(), c.block_grid);
  std::vector<Row> rows;
  for (const BlockRow& r : rep.rows)
    rows.push_back({std::to_string(r.n), std::to_string(r.p), std::to_string(r.q),
                    format(r.q_over_p), format(r.p_over_n), format(r.mixing_term),
                    format(r.weighted_sum_term), r.ordered ? "1" : "0"});
  write_csv(c.output,
            {"n", "p", "q", "q_over_p", "p_over_n", "mixing_term", "weighted_sum_term", "ordered"},
            rows);
  static constexpr const char* kNames[] = {"q/p", "p/n", "n alpha_q / p", "(p/n) sum j alpha_j"};
  bool pass = rep.n0 > 0;
  ctx.out << "blocks: n0=" << rep.n0 << "\n";
  for (std::size_t i = 0; i < 4; ++i) {
    ctx.out << "  " << std::left << std::setw(22) << kNames[i]
            << (rep.decreasing[i] ? "decreasing " : "not-decreasing ")
            << (rep.vanishing[i] ? "vanishing" : "not-vanishing") << "\n";
    pass = pass && rep.vanishing[i];
  }
  ctx.out << "  " << (pass ? "PASS" : "FAIL") << "\n";
  return pass ? kPass : kStatFail;
}

FitSpec fit_spec(const RunConfig& c) {
  FitSpec spec;
  spec.family = c.win.kind();
  if (spec.family == WinFunction::Kind::table)
    throw ConfigError("model.win: table win functions cannot be calibrated");
  if (spec.family == WinFunction::Kind::transformed_ratio) {
    spec.c1 = Parameter::fixed(c.win.c1());
    spec.c2 = Parameter::fixed(c.win.c2());
  } else {
    spec.c1 = Parameter::fixed(1.0);
    spec.c2 = Parameter::fixed(0.5);
  }
  if (c.mu.kind() != Measure::Kind::uniform)
    throw ConfigError("model.mu: calibration fits a uniform strength law");
  spec.mu_lo = Parameter::fixed(c.mu.lo());
  spec.mu_hi = Parameter::fixed(c.mu.hi());
  const Measure nu = c.process.marginal();
  spec.nu_atoms.clear();
  spec.nu_logits.clear();
  const auto atoms = nu.atoms();
  if (atoms.empty()) throw ConfigError("model.process: calibration needs a discrete tilting marginal");
  const double last = atoms.back().weight;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    spec.nu_atoms.push_back(Parameter::fixed(atoms[i].value));
    if (i + 1 < atoms.size()) {
      if (!(atoms[i].weight > 0.0 && last > 0.0))
        throw ConfigError("model.process: calibration needs positive tilting weights");
      spec.nu_logits.push_back(Parameter::fixed(std::log(atoms[i].weight / last)));
    }
  }

  const std::vector<std::string> names = parameter_names(spec);
  for (const std::string& name : c.free_params) {
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) {
      const std::vector<std::string_view> list(names.begin(), names.end());
      throw ConfigError("calibrate.free: unknown parameter '" + name + "' (did you mean '" +
                        config::nearest_key(name, list) + "'?)");
    }
    auto widen = [](Parameter& p, double lo, double hi) {
      p = Parameter::boxed(std::clamp(p.initial, lo, hi), lo, hi);
    };
    if (name == "c1") widen(spec.c1, 0.1, 10.0);
    else if (name == "c2") widen(spec.c2, 0.5, 0.9999);
    else if (name == "mu_lo") widen(spec.mu_lo, 0.0, spec.mu_lo.initial + 0.5 * (spec.mu_hi.initial - spec.mu_lo.initial));
    else if (name == "mu_hi") widen(spec.mu_hi, 0.5 * (spec.mu_lo.initial + spec.mu_hi.initial), 2.0 * spec.mu_hi.initial);
    else if (name.rfind("nu_atom_", 0) == 0) widen(spec.nu_atoms[std::stoul(name.substr(8))], 0.01, 10.0);
    else widen(spec.nu_logits[std::stoul(name.substr(9))], -6.0, 6.0);
  }
  spec.multistart = static_cast<std::size_t>(c.multistart);
  spec.max_evals_per_start = static_cast<std::size_t>(c.max_evals);
  spec.tol = std::max(c.tol, 1e-10);
  spec.threads = c.threads;
  return spec;
}

int cmd_calibrate(const Context& ctx) {
  const RunConfig& c = ctx.c;
  RankingData data;
  data.mean_points = csv::read_column(c.data, "mean_points");
  data.matches_per_team = static_cast<int>(c.matches_per_team);
  data.points_per_win = c.points_per_win;
  try {
    data.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("calibrate.data: ") + e.what());
  }
  const FitSpec spec = fit_spec(c);
  const FitResult result = fit(data, spec);
  const double baseline = linear_fit_rmse(result.observed);

  std::ostringstream block;
  block << "[fit]\n"
        << "rmse = " << format(result.rmse) << "\n"
        << "linear_rmse = " << format(baseline) << "\n"
        << "best_start = " << result.best_start << "\n"
        << "evaluations = " << result.trace.size() << "\n";
  for (std::size_t i = 0; i < result.names.size(); ++i)
    block << result.names[i] << " = " << format(result.params[i]) << "\n";
  if (!c.params_out.empty()) csv::write_atomic(c.params_out, block.str());

  std::vector<Row> rows;
  for (std::size_t i = 0; i < result.observed.size(); ++i)
    rows.push_back({std::to_string(i), format(result.observed[i]), format(result.predicted[i])});
  write_csv(c.output, {"rank_index", "observed", "predicted"}, rows);
  const bool pass = result.rmse < baseline;
  ctx.out << block.str() << (pass ? "PASS" : "FAIL") << " (fit rmse vs linear baseline)\n";
  return pass ? kPass : kStatFail;
}

int cmd_appendix(const Context& ctx) {
  const RunConfig& c = ctx.c;
  const auto two_n = static_cast<std::size_t>(c.appendix_two_n);
  const ShiftKernel h = ShiftKernel::product([](double x) { return x; }, [](double y) { return y; });
  const Measure u = Measure::uniform(0.0, 1.0);
  std::vector<Row> rows;
  long ok = 0;
  std::vector<double> samples(two_n);
  for (long run = 0; run < c.appendix_runs; ++run) {
    Stream rng = Stream::derive(*c.seed, "appendix", static_cast<std::uint64_t>(run));
    for (double& x : samples) x = u.sample(rng);
    const ShiftDeviation d = uniform_shift_deviation(samples, h, 1.0, c.delta);
    ok += d.concentration_ok;
    rows.push_back({std::to_string(run), format(d.sup_dev), format(d.mean_estimate),
                    format(d.eps_star), d.concentration_ok ? "1" : "0"});
  }
  write_csv(c.output, {"run", "sup_dev", "mean_estimate", "eps_star", "concentration_ok"}, rows);
  const double frac = static_cast<double>(ok) / static_cast<double>(c.appendix_runs);
  const bool pass = frac >= 1.0 - c.delta;
  ctx.out << "appendix-check: h(x,y)=xy, X~U[0,1], 2n=" << two_n << ", " << c.appendix_runs
          << " runs\n"
          << "  sup_dev <= eps* in " << ok << "/" << c.appendix_runs << " runs  "
          << (pass ? "PASS" : "FAIL") << "\n";
  return pass ? kPass : kStatFail;
}

}  // namespace

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    validate(config);
    const Context ctx{config, out, err};
    const std::string& cmd = config.command;
    if (cmd == "simulate") return cmd_simulate(ctx);
    if (cmd == "analytic-curve") return cmd_analytic_curve(ctx);
    if (cmd == "validate-lln") return cmd_validate_lln(ctx);
    if (cmd == "validate-clt") return cmd_validate_clt(ctx);
    if (cmd == "validate-gsum") return cmd_validate_gsum(ctx);
    if (cmd == "ranking") return cmd_ranking(ctx);
    if (cmd == "mixing") return cmd_mixing(ctx);
    if (cmd == "blocks") return cmd_blocks(ctx);
    if (cmd == "calibrate") return cmd_calibrate(ctx);
    return cmd_appendix(ctx);
  } catch (const InvalidArgument& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
}

}  // namespace qleague::cli
