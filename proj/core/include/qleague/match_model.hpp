#pragma once

// Win functions f(x, y) and the opponent-averaged kernels built from them.

#include <cstddef>
#include <string>
#include <vector>

#include "qleague/measures.hpp"

namespace qleague {

class WinFunction {
 public:
  enum class Kind { ratio, transformed_ratio, const_half, table };

  /// f(x, y) = x / (x + y).
  static WinFunction ratio();
  /// f(x, y) = g(x) / (g(x) + g(y)) with g(x) = log(1 - min{x / c1, c2}).
  static WinFunction transformed_ratio(double c1, double c2);
  static WinFunction const_half();
  /// Bilinear interpolation of values[i][j] = f(xs[i], ys[j]); queries outside
  /// the grid are clamped to its border, results to [0, 1].
  static WinFunction table(std::vector<double> xs, std::vector<double> ys,
                           std::vector<std::vector<double>> values);

  Kind kind() const noexcept { return kind_; }
  double c1() const noexcept { return c1_; }
  double c2() const noexcept { return c2_; }
  const std::vector<double>& table_xs() const noexcept { return xs_; }
  const std::vector<double>& table_ys() const noexcept { return ys_; }
  const std::vector<std::vector<double>>& table_values() const noexcept { return values_; }

  /// Probability that strength x beats strength y. Throws DomainError when the
  /// ratio forms meet 0/0.
  double operator()(double x, double y) const;

  /// Weakly increasing in x, weakly decreasing in y (true for every family
  /// except tables, which are checked on their grid).
  bool is_monotone() const;

  std::string describe() const;

  friend bool operator==(const WinFunction&, const WinFunction&) = default;

 private:
  WinFunction() = default;
  double interpolate(double x, double y) const;

  Kind kind_ = Kind::const_half;
  double c1_ = 0.0;
  double c2_ = 0.0;
  std::vector<double> xs_;
  std::vector<double> ys_;
  std::vector<std::vector<double>> values_;
};

/// Opponent-averaged kernels for a win function and tilting marginal nu:
///   F_s(x, y)       = E[f(s x, y V')]
///   F~_s(x, y)      = F_s(x, y) - E[F_s(V, y)]
///   G_s(y)          = E[f(s V, y V')] = E[F_s(V, y)]
/// with V, V' independent draws from nu.
class Kernel {
 public:
  Kernel(WinFunction win, Measure nu) : win_(std::move(win)), nu_(std::move(nu)) {}

  const WinFunction& win() const noexcept { return win_; }
  const Measure& nu() const noexcept { return nu_; }

  double F(double s, double x, double y, double tol) const;
  double F_tilde(double s, double x, double y, double tol) const;
  double G(double s, double y, double tol) const;

 private:
  WinFunction win_;
  Measure nu_;
};

}  // namespace qleague
