#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "qleague/error.hpp"

namespace qleague {

inline constexpr std::size_t kQuadratureMaxEvals = std::size_t{1} << 20;

/// Adaptive Simpson quadrature of f over [a, b] with absolute error budget
/// `tol`. Intervals are bisected until the Richardson estimate
/// |S(left) + S(right) - S| / 15 falls below the local share of the budget.
/// Throws QuadratureError once `max_evals` integrand evaluations are spent.
template <class F>
double adaptive_simpson(F&& f, double a, double b, double tol,
                        std::size_t max_evals = kQuadratureMaxEvals) {
  if (!(b > a)) return 0.0;
  struct Panel {
    double a, b, fa, fm, fb, whole, tol;
    int depth;
  };
  constexpr int kMinDepth = 4;
  constexpr int kMaxDepth = 60;

  std::size_t evals = 0;
  auto eval = [&](double x) {
    ++evals;
    return static_cast<double>(f(x));
  };
  auto simpson = [](double a, double b, double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  };

  const double fa = eval(a);
  const double fb = eval(b);
  const double fm = eval(0.5 * (a + b));
  std::vector<Panel> stack;
  stack.push_back({a, b, fa, fm, fb, simpson(a, b, fa, fm, fb), tol, 0});

  double total = 0.0;
  double compensation = 0.0;
  double error_estimate = 0.0;
  while (!stack.empty()) {
    const Panel p = stack.back();
    stack.pop_back();
    const double m = 0.5 * (p.a + p.b);
    const double flm = eval(0.5 * (p.a + m));
    const double frm = eval(0.5 * (m + p.b));
    const double left = simpson(p.a, m, p.fa, flm, p.fm);
    const double right = simpson(m, p.b, p.fm, frm, p.fb);
    const double delta = left + right - p.whole;
    if (p.depth >= kMinDepth &&
        (std::abs(delta) <= 15.0 * p.tol || p.depth >= kMaxDepth)) {
      // Kahan summation keeps the accumulated panels at full precision.
      const double y = left + right + delta / 15.0 - compensation;
      const double t = total + y;
      compensation = (t - total) - y;
      total = t;
      error_estimate += std::abs(delta) / 15.0;
      continue;
    }
    if (evals + 2 > max_evals) {
      throw QuadratureError(
          "adaptive Simpson exceeded " + std::to_string(max_evals) +
              " evaluations (accumulated error " +
              std::to_string(error_estimate + std::abs(delta) / 15.0) + ")",
          error_estimate + std::abs(delta) / 15.0);
    }
    stack.push_back({m, p.b, p.fm, frm, p.fb, right, 0.5 * p.tol, p.depth + 1});
    stack.push_back({p.a, m, p.fa, flm, p.fm, left, 0.5 * p.tol, p.depth + 1});
  }
  return total;
}

}  // namespace qleague
