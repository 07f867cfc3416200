#include "qleague/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qleague/error.hpp"

namespace qleague {

double ell(const WinFunction& w, const Measure& nu, const Measure& mu, double s, double tol) {
  if (!(s >= 0.0)) throw InvalidArgument("ell requires s >= 0");
  const Kernel kernel(w, nu);
  return mu.expect([&](double u) { return kernel.G(s, u, 0.5 * tol); }, 0.5 * tol);
}

double second_moment_F(const WinFunction& w, const Measure& nu, const Measure& mu, double s,
                       double tol) {
  const Kernel kernel(w, nu);
  return nu.expect(
      [&](double v) {
        return mu.expect(
            [&](double u) {
              const double f = kernel.F(s, v, u, 0.125 * tol);
              return f * f;
            },
            0.5 * tol);
      },
      0.25 * tol);
}

double sigma2(const WinFunction& w, const Measure& nu, const Measure& mu, double s, double tol) {
  const double value = ell(w, nu, mu, s, 0.5 * tol) - second_moment_F(w, nu, mu, s, 0.5 * tol);
  // F in [0, 1] gives F - F^2 >= 0 pointwise; only round-off can undershoot.
  return std::max(0.0, value);
}

double ell_two_state_ratio_closed_form(double a, double b, double nu_a, double nu_b, double s) {
  if (s == 0.0) return 0.0;
  const double states[2] = {a, b};
  const double weights[2] = {nu_a, nu_b};
  double total = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const double si = s * states[i];
      total += si / states[j] * std::log1p(states[j] / si) * weights[i] * weights[j];
    }
  return total;
}

double ell_half_two_closed_form(double s) {
  if (s == 0.0) return 0.0;
  const double log_argument = 8.0 * std::log1p(s) + std::log(4.0 + s) +
                              16.0 * std::log1p(4.0 * s) - 32.0 * std::log(2.0) -
                              25.0 * std::log(s);
  return s / 16.0 * log_argument;
}

BoundedKernel win_kernel(const WinFunction& w, const Measure& nu, double s, double tol) {
  Kernel kernel(w, nu);
  return {[kernel, s, tol](double x, double y) { return kernel.F(s, x, y, tol); }, 1.0};
}

Rho2Result rho2_markov(const BoundedKernel& g, const MarkovTilting& chain, const Measure& mu,
                       double tol) {
  if (!(tol > 0.0)) throw InvalidArgument("rho2_markov requires tol > 0");
  const std::size_t n = chain.size();
  const auto& states = chain.states();
  const Eigen::VectorXd& pi = chain.stationary();

  auto centered = [&](std::size_t i, double u) {
    double mean = 0.0;
    for (std::size_t k = 0; k < n; ++k) mean += pi(static_cast<Eigen::Index>(k)) * g.g(states[k], u);
    return g.g(states[i], u) - mean;
  };

  Rho2Result out;
  const double quad_tol = 0.25 * tol;
  Eigen::VectorXd m(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const double mean_i = mu.expect([&](double u) { return centered(i, u); }, quad_tol);
    const double sq_i = mu.expect(
        [&](double u) {
          const double c = centered(i, u);
          return c * c;
        },
        quad_tol);
    m(static_cast<Eigen::Index>(i)) = mean_i;
    out.state_means.push_back(mean_i);
    out.diagonal += pi(static_cast<Eigen::Index>(i)) * sq_i;
  }

  // Term-by-term series, truncated by the geometric alpha envelope:
  // |term_k| <= 4 ||g~||^2 alpha_k <= 4 B^2 C lambda^k.
  const double lambda = chain.second_eigenvalue_modulus();
  const double envelope = chain.envelope_constant();
  const double b2 = g.bound * g.bound;
  auto remainder_after = [&](unsigned k) {
    if (envelope == 0.0) return 0.0;
    return 2.0 * 4.0 * b2 * envelope * std::pow(lambda, static_cast<double>(k) + 1.0) /
           (1.0 - lambda);
  };
  constexpr unsigned kMaxTerms = 5'000'000;
  unsigned k = 0;
  double series = 0.0;
  while (remainder_after(k) > 0.5 * tol) {
    if (k >= kMaxTerms)
      throw ConsistencyError("rho2 series did not reach its truncation target");
    ++k;
    const Eigen::MatrixXd joint = chain.joint_law(k);
    series += m.dot(joint * m);
  }
  out.series = series;
  out.terms_used = k;
  out.truncation_bound = remainder_after(k);

  const auto ni = static_cast<Eigen::Index>(n);
  const Eigen::MatrixXd one_pi = Eigen::VectorXd::Ones(ni) * pi.transpose();
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(ni, ni);
  const Eigen::MatrixXd z = (eye - chain.transition() + one_pi).inverse();
  out.series_fundamental = m.dot(pi.asDiagonal() * ((z - eye + one_pi) * m));

  if (std::abs(2.0 * (out.series - out.series_fundamental)) > tol) {
    throw ConsistencyError("rho2 routes disagree: truncated series " + std::to_string(series) +
                           " vs fundamental matrix " + std::to_string(out.series_fundamental));
  }
  double rho2 = out.diagonal + 2.0 * out.series;
  if (rho2 < -tol) throw ConsistencyError("rho2 is negative: " + std::to_string(rho2));
  out.rho2 = std::max(0.0, rho2);
  return out;
}

double rho2_iid(const BoundedKernel& g, const Measure& nu, const Measure& mu, double tol) {
  const double inner_tol = 0.25 * tol;
  return nu.expect(
      [&](double x) {
        return mu.expect(
            [&](double u) {
              const double mean = nu.expect([&](double v) { return g.g(v, u); }, inner_tol);
              const double c = g.g(x, u) - mean;
              return c * c;
            },
            0.5 * tol);
      },
      0.25 * tol);
}

LimitReport limit_report(const WinFunction& w, const TiltingProcess& proc, const Measure& mu,
                         double s, double tol) {
  const Measure nu = proc.marginal();
  LimitReport report;
  report.s = s;
  report.ell = ell(w, nu, mu, s, tol);
  report.sigma2 = std::max(0.0, report.ell - second_moment_F(w, nu, mu, s, tol));
  const BoundedKernel g = win_kernel(w, nu, s, 0.01 * tol);
  if (const auto* chain = proc.markov()) {
    const Rho2Result r = rho2_markov(g, *chain, mu, tol);
    report.rho2 = r.rho2;
    report.rho2_truncation_bound = r.truncation_bound;
    report.terms_used = r.terms_used;
    report.rho2_diagonal = r.diagonal;
    report.rho2_series = r.series;
    report.rho2_series_fundamental = r.series_fundamental;
  } else {
    report.rho2 = rho2_iid(g, nu, mu, tol);
    report.rho2_diagonal = report.rho2;
  }
  return report;
}

BlockSchedule BlockSchedule::defaults() {
  BlockSchedule s;
  s.p = [](long n) {
    const double ll = std::log(std::log(static_cast<double>(n)));
    return static_cast<long>(std::floor(std::sqrt(static_cast<double>(n)) / ll));
  };
  s.q = [](long n) {
    const double ll = std::log(std::log(static_cast<double>(n)));
    return static_cast<long>(std::floor(std::sqrt(static_cast<double>(n)) / (ll * ll)));
  };
  return s;
}

BlockReport check_block_conditions(const std::function<double(unsigned)>& alpha,
                                   const BlockSchedule& schedule,
                                   const std::vector<long>& n_grid) {
  if (n_grid.empty()) throw InvalidArgument("block condition grid is empty");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] < 16) throw InvalidArgument("block condition grid values must be >= 16");
    if (i && n_grid[i] <= n_grid[i - 1])
      throw InvalidArgument("block condition grid must be increasing");
  }
  BlockReport report;
  for (long n : n_grid) {
    BlockRow row;
    row.n = n;
    row.p = schedule.p(n);
    row.q = schedule.q(n);
    row.ordered = 1 <= row.q && row.q <= row.p && row.p <= n;
    const double nd = static_cast<double>(n);
    const double pd = static_cast<double>(row.p);
    row.q_over_p = row.p > 0 ? static_cast<double>(row.q) / pd : 0.0;
    row.p_over_n = pd / nd;
    row.mixing_term = row.q >= 1 && row.p > 0
                          ? nd * alpha(static_cast<unsigned>(row.q)) / pd
                          : 0.0;
    double weighted = 0.0;
    for (long j = 1; j <= row.p; ++j)
      weighted += static_cast<double>(j) * alpha(static_cast<unsigned>(j));
    row.weighted_sum_term = pd / nd * weighted;
    report.rows.push_back(row);
  }
  for (std::size_t i = report.rows.size(); i-- > 0;) {
    if (!report.rows[i].ordered) break;
    report.n0 = report.rows[i].n;
  }
  auto column = [&](int c) {
    std::vector<double> v;
    for (const BlockRow& r : report.rows) {
      const double values[4] = {r.q_over_p, r.p_over_n, r.mixing_term, r.weighted_sum_term};
      v.push_back(values[c]);
    }
    return v;
  };
  for (int c = 0; c < 4; ++c) {
    const std::vector<double> v = column(c);
    const bool all_zero = std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
    bool non_increasing = true;
    for (std::size_t i = 1; i < v.size(); ++i) non_increasing = non_increasing && v[i] <= v[i - 1];
    report.decreasing[static_cast<std::size_t>(c)] =
        all_zero || (non_increasing && v.back() < v.front());
    report.vanishing[static_cast<std::size_t>(c)] =
        all_zero || v.back() == 0.0 || (v.front() > 0.0 && v.back() / v.front() < 0.5);
  }
  return report;
}

}  // namespace qleague
