#include "qleague/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "qleague/analytic.hpp"
#include "qleague/error.hpp"
#include "qleague/parallel.hpp"

namespace qleague {
namespace {

constexpr double kInfeasible = std::numeric_limits<double>::infinity();

double halton(std::size_t index, unsigned base) {
  double f = 1.0;
  double r = 0.0;
  while (index > 0) {
    f /= base;
    r += f * static_cast<double>(index % base);
    index /= base;
  }
  return r;
}

constexpr unsigned kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

std::vector<Parameter> all_parameters(const FitSpec& spec) {
  std::vector<Parameter> out = {spec.c1, spec.c2, spec.mu_lo, spec.mu_hi};
  out.insert(out.end(), spec.nu_atoms.begin(), spec.nu_atoms.end());
  out.insert(out.end(), spec.nu_logits.begin(), spec.nu_logits.end());
  return out;
}

}  // namespace

void RankingData::validate() const {
  if (mean_points.size() < 2) throw InvalidArgument("ranking data needs at least two teams");
  if (matches_per_team < 1) throw InvalidArgument("matches_per_team must be >= 1");
  if (!(points_per_win > 0.0)) throw InvalidArgument("points_per_win must be > 0");
  for (std::size_t i = 1; i < mean_points.size(); ++i)
    if (mean_points[i] > mean_points[i - 1])
      throw InvalidArgument("mean_points must be sorted descending by rank");
  for (double frac : win_fractions_ascending())
    if (!(frac >= 0.0 && frac <= 1.0))
      throw InvalidArgument("normalized win fractions must lie in [0, 1]");
}

std::vector<double> RankingData::win_fractions_ascending() const {
  std::vector<double> out;
  const double denom = points_per_win * static_cast<double>(matches_per_team);
  for (auto it = mean_points.rbegin(); it != mean_points.rend(); ++it) out.push_back(*it / denom);
  return out;
}

RankingData basketball_ranking() {
  return {{47.45, 42.27, 40.18, 37.59, 35.91, 34.09, 31.73, 30.55, 29.18, 27.77, 26.09, 24.36,
           22.00, 19.59, 17.82, 12.41},
          30,
          2.0};
}

ModelInstance basketball_instance() {
  return {WinFunction::transformed_ratio(1.3, 0.999), Measure::uniform(0.1, 0.999),
          Measure::discrete_normalized({{0.25, 0.6}, {1.3, 0.9}})};
}

std::vector<double> predicted_curve(const ModelInstance& instance, std::size_t n_points,
                                    double tol) {
  if (n_points == 0) throw InvalidArgument("predicted_curve needs N >= 1");
  std::vector<double> out;
  out.reserve(n_points);
  const double nd = static_cast<double>(n_points);
  for (std::size_t i = 0; i < n_points; ++i) {
    const double s = instance.mu.inverse_cdf((static_cast<double>(i) + 0.5) / nd);
    out.push_back(ell(instance.win, instance.nu, instance.mu, s, tol));
  }
  return out;
}

double rmse(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) throw InvalidArgument("rmse needs equal, nonempty inputs");
  double ss = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) ss += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(ss / static_cast<double>(a.size()));
}

double linear_fit_rmse(std::span<const double> y) {
  const std::size_t n = y.size();
  if (n < 2) throw InvalidArgument("linear fit needs at least two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = static_cast<double>(i);
    sx += x;
    sy += y[i];
    sxx += x * x;
    sxy += x * y[i];
  }
  const double nd = static_cast<double>(n);
  const double slope = (nd * sxy - sx * sy) / (nd * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / nd;
  std::vector<double> line(n);
  for (std::size_t i = 0; i < n; ++i) line[i] = intercept + slope * static_cast<double>(i);
  return rmse(y, line);
}

std::size_t FitSpec::n_free() const {
  const auto params = all_parameters(*this);
  return static_cast<std::size_t>(
      std::count_if(params.begin(), params.end(), [](const Parameter& p) { return p.free; }));
}

void FitSpec::validate() const {
  if (nu_atoms.empty()) throw InvalidArgument("fit spec needs at least one nu atom");
  if (nu_logits.size() + 1 != nu_atoms.size())
    throw InvalidArgument("fit spec needs exactly one nu logit fewer than atoms");
  for (const Parameter& p : all_parameters(*this)) {
    if (!(p.lower <= p.upper)) throw InvalidArgument("fit parameter box is empty");
    if (p.free && !(p.initial >= p.lower && p.initial <= p.upper))
      throw InvalidArgument("fit parameter initial value lies outside its box");
  }
  if (multistart == 0) throw InvalidArgument("multistart must be >= 1");
  if (!(tol > 0.0)) throw InvalidArgument("fit tolerance must be > 0");
  if (family == WinFunction::Kind::table) throw InvalidArgument("table win functions cannot be fitted");
}

std::vector<std::string> parameter_names(const FitSpec& spec) {
  std::vector<std::string> names = {"c1", "c2", "mu_lo", "mu_hi"};
  for (std::size_t i = 0; i < spec.nu_atoms.size(); ++i)
    names.push_back("nu_atom_" + std::to_string(i));
  for (std::size_t i = 0; i < spec.nu_logits.size(); ++i)
    names.push_back("nu_logit_" + std::to_string(i));
  return names;
}

ModelInstance instance_from(const FitSpec& spec, std::span<const double> p) {
  ModelInstance inst;
  switch (spec.family) {
    case WinFunction::Kind::ratio: inst.win = WinFunction::ratio(); break;
    case WinFunction::Kind::const_half: inst.win = WinFunction::const_half(); break;
    case WinFunction::Kind::transformed_ratio:
      inst.win = WinFunction::transformed_ratio(p[0], p[1]);
      break;
    case WinFunction::Kind::table:
      throw InvalidArgument("table win functions cannot be fitted");
  }
  inst.mu = Measure::uniform(p[2], p[3]);
  const std::size_t k = spec.nu_atoms.size();
  // Softmax with the last logit pinned at 0.
  std::vector<double> logits(p.begin() + 4 + static_cast<std::ptrdiff_t>(k), p.end());
  logits.push_back(0.0);
  const double top = *std::max_element(logits.begin(), logits.end());
  double norm = 0.0;
  for (double& l : logits) norm += (l = std::exp(l - top));
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < k; ++i) atoms.push_back({p[4 + i], logits[i] / norm});
  inst.nu = Measure::discrete(std::move(atoms));
  return inst;
}

NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& objective,
                             std::vector<double> start, std::span<const double> lower,
                             std::span<const double> upper, const NelderMeadOptions& options,
                             const std::function<void(std::span<const double>, double)>& on_eval) {
  const std::size_t dim = start.size();
  NelderMeadResult result;
  auto clip = [&](std::vector<double>& x) {
    for (std::size_t i = 0; i < dim; ++i) x[i] = std::clamp(x[i], lower[i], upper[i]);
  };
  auto evaluate = [&](const std::vector<double>& x) {
    ++result.evaluations;
    double v = objective(x);
    if (!std::isfinite(v)) v = kInfeasible;
    if (on_eval) on_eval(x, v);
    return v;
  };
  clip(start);
  if (dim == 0) {
    result.x = start;
    result.value = evaluate(start);
    return result;
  }

  struct Vertex {
    std::vector<double> x;
    double f;
    std::size_t id;
  };
  std::size_t next_id = 0;
  auto build_simplex = [&](const std::vector<double>& centre) {
    std::vector<Vertex> simplex;
    simplex.push_back({centre, evaluate(centre), next_id++});
    for (std::size_t i = 0; i < dim; ++i) {
      std::vector<double> x = centre;
      const double span = upper[i] - lower[i];
      double step = 0.1 * span;
      if (step == 0.0) step = 0.05 * std::max(1.0, std::abs(x[i]));
      // Step toward the interior so the vertex is not clipped onto the centre.
      x[i] += (x[i] + step <= upper[i]) ? step : -step;
      clip(x);
      simplex.push_back({x, evaluate(x), next_id++});
    }
    return simplex;
  };
  // Deterministic ordering: value first, then creation order.
  auto order = [](std::vector<Vertex>& s) {
    std::sort(s.begin(), s.end(), [](const Vertex& a, const Vertex& b) {
      return a.f < b.f || (a.f == b.f && a.id < b.id);
    });
  };

  std::vector<Vertex> simplex = build_simplex(start);
  std::size_t restarts = 0;
  while (result.evaluations < options.max_evals) {
    order(simplex);
    const double spread = simplex.back().f - simplex.front().f;
    double diameter = 0.0;
    for (std::size_t v = 1; v <= dim; ++v)
      for (std::size_t i = 0; i < dim; ++i)
        diameter = std::max(diameter, std::abs(simplex[v].x[i] - simplex[0].x[i]));
    if ((std::isfinite(spread) && spread <= options.f_tol) || diameter <= options.x_tol) {
      if (restarts >= options.max_restarts) break;
      ++restarts;
      const std::vector<double> best_x = simplex.front().x;
      const Vertex best = simplex.front();
      simplex = build_simplex(best_x);
      simplex.front() = best;
      continue;
    }

    std::vector<double> centroid(dim, 0.0);
    for (std::size_t v = 0; v < dim; ++v)
      for (std::size_t i = 0; i < dim; ++i) centroid[i] += simplex[v].x[i] / static_cast<double>(dim);
    const Vertex& worst = simplex.back();
    auto along = [&](double t) {
      std::vector<double> x(dim);
      for (std::size_t i = 0; i < dim; ++i) x[i] = centroid[i] + t * (worst.x[i] - centroid[i]);
      clip(x);
      return x;
    };

    std::vector<double> xr = along(-1.0);
    const double fr = evaluate(xr);
    if (fr < simplex.front().f) {
      std::vector<double> xe = along(-2.0);
      const double fe = evaluate(xe);
      if (fe < fr) simplex.back() = {std::move(xe), fe, next_id++};
      else simplex.back() = {std::move(xr), fr, next_id++};
      continue;
    }
    if (fr < simplex[dim - 1].f) {
      simplex.back() = {std::move(xr), fr, next_id++};
      continue;
    }
    const bool outside = fr < worst.f;
    std::vector<double> xc = along(outside ? -0.5 : 0.5);
    const double fc = evaluate(xc);
    if (fc < (outside ? fr : worst.f)) {
      simplex.back() = {std::move(xc), fc, next_id++};
      continue;
    }
    for (std::size_t v = 1; v <= dim; ++v) {
      for (std::size_t i = 0; i < dim; ++i)
        simplex[v].x[i] = simplex[0].x[i] + 0.5 * (simplex[v].x[i] - simplex[0].x[i]);
      clip(simplex[v].x);
      simplex[v].f = evaluate(simplex[v].x);
      simplex[v].id = next_id++;
    }
  }
  order(simplex);
  result.x = simplex.front().x;
  result.value = simplex.front().f;
  return result;
}

FitResult fit(const RankingData& data, const FitSpec& spec) {
  data.validate();
  spec.validate();
  const std::vector<double> observed = data.win_fractions_ascending();
  const std::vector<Parameter> params = all_parameters(spec);
  std::vector<std::size_t> free_index;
  for (std::size_t i = 0; i < params.size(); ++i)
    if (params[i].free) free_index.push_back(i);
  const std::size_t dim = free_index.size();
  std::vector<double> lower, upper;
  for (std::size_t i : free_index) {
    lower.push_back(params[i].lower);
    upper.push_back(params[i].upper);
  }

  auto expand = [&](std::span<const double> x) {
    std::vector<double> full;
    for (const Parameter& p : params) full.push_back(p.initial);
    for (std::size_t k = 0; k < dim; ++k) full[free_index[k]] = x[k];
    return full;
  };
  auto objective = [&](std::span<const double> x) {
    try {
      const ModelInstance inst = instance_from(spec, expand(x));
      return rmse(observed, predicted_curve(inst, observed.size(), spec.tol));
    } catch (const Error&) {
      return kInfeasible;
    }
  };

  std::vector<std::vector<double>> starts;
  std::vector<double> initial;
  for (std::size_t i : free_index) initial.push_back(params[i].initial);
  starts.push_back(initial);
  for (std::size_t s = 1; s < spec.multistart; ++s) {
    std::vector<double> x(dim);
    for (std::size_t k = 0; k < dim; ++k)
      x[k] = lower[k] + (upper[k] - lower[k]) * halton(s, kPrimes[k % std::size(kPrimes)]);
    starts.push_back(std::move(x));
  }

  std::vector<NelderMeadResult> outcomes(starts.size());
  std::vector<std::vector<TraceEntry>> traces(starts.size());
  NelderMeadOptions options;
  options.max_evals = spec.max_evals_per_start;
  parallel_for(starts.size(), spec.threads, [&](std::size_t s) {
    outcomes[s] = nelder_mead(objective, starts[s], lower, upper, options,
                              [&](std::span<const double> x, double v) {
                                traces[s].push_back({s, traces[s].size(), v, expand(x)});
                              });
  });

  std::size_t best = starts.size();
  for (std::size_t s = 0; s < outcomes.size(); ++s) {
    if (!std::isfinite(outcomes[s].value)) continue;
    if (best == starts.size() || outcomes[s].value < outcomes[best].value) best = s;
  }
  if (best == starts.size()) throw Error("fit: no starting point produced a finite objective");

  FitResult result;
  result.names = parameter_names(spec);
  result.params = expand(outcomes[best].x);
  result.rmse = outcomes[best].value;
  result.best_start = best;
  result.instance = instance_from(spec, result.params);
  result.observed = observed;
  result.predicted = predicted_curve(result.instance, observed.size(), spec.tol);
  for (auto& t : traces) result.trace.insert(result.trace.end(), t.begin(), t.end());
  return result;
}

}  // namespace qleague
