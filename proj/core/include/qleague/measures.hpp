#pragma once

// Probability measures on the nonnegative half-line.

#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qleague/error.hpp"
#include "qleague/quadrature.hpp"
#include "qleague/random.hpp"

namespace qleague {

struct Atom {
  double value;
  double weight;

  friend bool operator==(const Atom&, const Atom&) = default;
};

class Measure {
 public:
  enum class Kind { discrete, uniform, empirical };

  /// Atoms with weights summing to 1 within 1e-6 (renormalized silently);
  /// anything further off is rejected.
  static Measure discrete(std::vector<Atom> atoms);
  /// Accepts any positive total weight and rescales it to 1. `rescaled` is set
  /// when the input total differed from 1 by more than 1e-6.
  static Measure discrete_normalized(std::vector<Atom> atoms,
                                     bool* rescaled = nullptr);
  static Measure uniform(double lo, double hi);
  static Measure empirical(std::vector<double> samples);
  static Measure point(double value) { return discrete({{value, 1.0}}); }

  Kind kind() const noexcept { return kind_; }
  bool has_finite_support() const noexcept { return kind_ != Kind::uniform; }

  /// Discrete: the atoms as given (after normalization). Empirical: each
  /// sample as an atom of weight 1/N. Uniform: empty.
  std::span<const Atom> atoms() const noexcept { return atoms_; }
  std::span<const double> samples() const noexcept { return samples_; }
  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }

  double sample(Stream& rng) const;
  double cdf(double y) const;
  /// inf{y >= 0 : H(y) >= x} for x in [0, 1].
  double inverse_cdf(double x) const;
  double mean() const;
  /// Smallest and largest points of the support.
  std::pair<double, double> support() const;

  /// E[h(X)]. Exact sums for discrete/empirical measures, adaptive Simpson with
  /// absolute error <= tol for the uniform case.
  template <class H>
  double expect(H&& h, double tol) const;

  std::string describe() const;

  friend bool operator==(const Measure&, const Measure&) = default;

 private:
  Measure() = default;

  Kind kind_ = Kind::discrete;
  std::vector<Atom> atoms_;
  std::vector<Atom> sorted_;  // merged by value, ascending
  std::vector<double> cumulative_;
  std::vector<double> samples_;
  double lo_ = 0.0;
  double hi_ = 0.0;
};

namespace detail {
// Endpoints of the uniform support carry no mass; if the integrand is
// undefined exactly there, evaluate a relative machine epsilon inside.
template <class H>
double guarded_eval(H& h, double x, double toward) {
  try {
    return static_cast<double>(h(x));
  } catch (const DomainError&) {
    return static_cast<double>(h(x + (toward - x) * std::numeric_limits<double>::epsilon()));
  }
}
}  // namespace detail

template <class H>
double Measure::expect(H&& h, double tol) const {
  if (kind_ == Kind::uniform) {
    const double lo = lo_;
    const double hi = hi_;
    const double width = hi - lo;
    auto integrand = [&](double x) {
      if (x == lo) return detail::guarded_eval(h, x, hi);
      if (x == hi) return detail::guarded_eval(h, x, lo);
      return static_cast<double>(h(x));
    };
    return adaptive_simpson(integrand, lo, hi, tol * width) / width;
  }
  double acc = 0.0;
  if (kind_ == Kind::empirical) {
    for (double x : samples_) acc += static_cast<double>(h(x));
    return acc / static_cast<double>(samples_.size());
  }
  for (const Atom& a : atoms_) acc += a.weight * static_cast<double>(h(a.value));
  return acc;
}

}  // namespace qleague
