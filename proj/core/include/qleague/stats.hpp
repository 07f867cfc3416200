#pragma once

// Statistical validation harness for the quenched limit theorems.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "qleague/analytic.hpp"
#include "qleague/simulate.hpp"

namespace qleague {

struct NormalityReport {
  std::size_t sample_size = 0;
  double sample_mean = 0.0;
  double sample_var = 0.0;
  double target_var = 0.0;
  double ks_statistic = 0.0;
  double ks_threshold = 0.0;
  double var_tol = 0.1;
  bool ks_pass = false;
  bool var_pass = false;
  /// Target variance 0 and every sample 0.
  bool degenerate = false;
  bool pass = false;
};

/// Standard normal CDF through erfc.
double normal_cdf(double x);

/// sup_x |F_N(x) - Phi(x / sqrt(variance))|.
double ks_statistic_normal(std::span<const double> samples, double variance);

/// One-sample KS against N(0, variance) combined with a variance-ratio check.
/// Threshold defaults to 1.36 / sqrt(N), the asymptotic 5% level.
NormalityReport ks_against_normal(std::span<const double> samples, double variance,
                                  double var_tol = 0.1,
                                  std::optional<double> threshold = std::nullopt);

struct CltOptions {
  std::uint64_t seed = 0;
  unsigned threads = 1;
  double var_tol = 0.1;
  /// Quadrature tolerance for the exact quenched mean.
  double tol = 1e-9;
  /// Spread each integer win count uniformly over [W - 1/2, W + 1/2) before
  /// testing; removes the lattice offset of the empirical CDF (about half the
  /// modal mass, ~1/(2 sqrt(2 pi) sd)), which otherwise rivals the KS
  /// threshold at a few thousand replicas. Adds variance 1/(24 n).
  bool continuity_jitter = true;
};

/// (W_n(s) - E_s[W_n(s)]) / sqrt(2n) for each replica (focal mode).
std::vector<double> standardized_wins(const QuenchedEnvironment& env, const TiltingProcess& proc,
                                      const WinFunction& w, std::size_t replicas,
                                      const CltOptions& options);

NormalityReport clt_check_wins(const QuenchedEnvironment& env, const TiltingProcess& proc,
                               const WinFunction& w, std::size_t replicas,
                               const LimitReport& report, const CltOptions& options = {});

/// sum_j g~(xi_j, s_j) / sqrt(2n) for `replicas` independent paths of length
/// strengths.size() = 2n - 1.
std::vector<double> gsum_samples(const BoundedKernel& g, const TiltingProcess& proc,
                                 std::span<const double> strengths, std::size_t replicas,
                                 std::uint64_t seed, double tol = 1e-10, unsigned threads = 1);

struct GsumCheck {
  NormalityReport normality;
  double rho2 = 0.0;
};

/// Tests the normalized g-sum against N(0, rho_g^2) from rho2_markov (or the
/// i.i.d. formula).
GsumCheck clt_check_gsum(const BoundedKernel& g, const TiltingProcess& proc, const Measure& mu,
                         std::span<const double> strengths, std::size_t replicas,
                         const CltOptions& options = {});

/// h(x, y) either as a general callable or as a sum of products phi(x) psi(y);
/// the separable form is evaluated with FFT cross-correlation.
struct ShiftKernel {
  std::function<double(double, double)> h;
  std::vector<std::pair<std::function<double(double)>, std::function<double(double)>>> separable;

  static ShiftKernel general(std::function<double(double, double)> h);
  static ShiftKernel product(std::function<double(double)> phi, std::function<double(double)> psi);

  double operator()(double x, double y) const;
};

struct ShiftDeviation {
  /// sup_{k in [n]} |n^-1 sum_{i<=n} h(X_i, X_{i+k}) - E^[h]|
  double sup_dev = 0.0;
  /// Disjoint-pair estimate n^-1 sum_i h(X_{2i-1}, X_{2i}).
  double mean_estimate = 0.0;
  /// Solves 2n exp(-n eps^2 / (18 A^2)) = delta.
  double eps_star = 0.0;
  bool concentration_ok = false;
};

/// `samples` holds X_1..X_{2n}. Throws InvalidArgument if |h| > bound is seen.
ShiftDeviation uniform_shift_deviation(std::span<const double> samples, const ShiftKernel& h,
                                       double bound, double delta = 0.01);

/// Brute-force O(n^2) reference for the shift sums; S[k-1] = sum_i h(X_i, X_{i+k}).
std::vector<double> shift_sums_direct(std::span<const double> samples, const ShiftKernel& h);
std::vector<double> shift_sums_fft(std::span<const double> samples, const ShiftKernel& h);

/// sup_i |curve_i - predicted_i|.
double sup_distance(std::span<const double> curve, std::span<const double> predicted);

}  // namespace qleague
