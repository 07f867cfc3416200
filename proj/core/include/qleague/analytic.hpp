#pragma once

// Limit quantities of the quenched LLN/CLT:
//   ell(s)    = E[f(s V, U V')]
//   sigma2(s) = ell(s) - E[F_s(V, U)^2]
//   rho2      = E[g~(V, U)^2] + 2 sum_{k>=1} E[g~(xi_1, U) g~(xi_{1+k}, U')]
// with V, V' ~ nu (the tilting marginal), U, U' ~ mu (the strength law).

#include <array>
#include <functional>
#include <vector>

#include "qleague/match_model.hpp"
#include "qleague/measures.hpp"
#include "qleague/processes.hpp"

namespace qleague {

double ell(const WinFunction& w, const Measure& nu, const Measure& mu, double s, double tol);

/// E[F_s(V, U)^2], summing over the atoms of nu outside and integrating over
/// mu inside.
double second_moment_F(const WinFunction& w, const Measure& nu, const Measure& mu, double s,
                       double tol);

double sigma2(const WinFunction& w, const Measure& nu, const Measure& mu, double s, double tol);

/// Ratio rule, two-state tilting {a, b} with weights (nu_a, nu_b), mu = U[0,1]:
///   sum_{i,j} (s i / j) log(1 + j / (s i)) nu_i nu_j.
double ell_two_state_ratio_closed_form(double a, double b, double nu_a, double nu_b, double s);

/// The a = 1/2, b = 2, nu uniform specialization of the above:
///   (s / 16) log((1 + s)^8 (4 + s) (1 + 4s)^16 / (2^32 s^25)).
double ell_half_two_closed_form(double s);

/// A bounded function g: R+^2 -> [0, bound].
struct BoundedKernel {
  std::function<double(double, double)> g;
  double bound = 1.0;
};

/// g(x, y) = F_s(x, y) for the given win function and tilting marginal.
BoundedKernel win_kernel(const WinFunction& w, const Measure& nu, double s, double tol);

struct Rho2Result {
  double rho2 = 0.0;
  /// E[g~(V, U)^2].
  double diagonal = 0.0;
  /// Truncated correlation series (without the factor 2).
  double series = 0.0;
  /// Same series through the fundamental matrix.
  double series_fundamental = 0.0;
  /// Certified bound on |rho2 - (diagonal + 2 series)| from truncation.
  double truncation_bound = 0.0;
  unsigned terms_used = 0;
  /// m_i = E[g~(state_i, U)].
  std::vector<double> state_means;
};

/// rho_g^2 for a finite-state chain. The series is evaluated twice: summed
/// term by term from joint_law(k) until the alpha envelope certifies the
/// remainder below tol / 2, and in closed form m' diag(pi) (Z - I + 1 pi) m
/// with Z = (I - P + 1 pi)^-1. Throws ConsistencyError if the two disagree by
/// more than tol, or if rho2 < -tol.
Rho2Result rho2_markov(const BoundedKernel& g, const MarkovTilting& chain, const Measure& mu,
                       double tol);

/// i.i.d. tilting: the series vanishes and rho_g^2 = E[g~(V, U)^2].
double rho2_iid(const BoundedKernel& g, const Measure& nu, const Measure& mu, double tol);

struct LimitReport {
  double s = 0.0;
  double ell = 0.0;
  double sigma2 = 0.0;
  double rho2 = 0.0;
  double rho2_truncation_bound = 0.0;
  unsigned terms_used = 0;
  /// Diagnostics from the Markov route (zero for i.i.d. tilting).
  double rho2_diagonal = 0.0;
  double rho2_series = 0.0;
  double rho2_series_fundamental = 0.0;

  double total_var() const noexcept { return sigma2 + rho2; }
};

LimitReport limit_report(const WinFunction& w, const TiltingProcess& proc, const Measure& mu,
                         double s, double tol);

struct BlockSchedule {
  std::function<long(long)> p;
  std::function<long(long)> q;

  /// p = floor(sqrt(n) / log log n), q = floor(sqrt(n) / (log log n)^2).
  static BlockSchedule defaults();
};

struct BlockRow {
  long n = 0;
  long p = 0;
  long q = 0;
  double q_over_p = 0.0;
  double p_over_n = 0.0;
  /// n alpha_q / p
  double mixing_term = 0.0;
  /// (p / n) sum_{j<=p} j alpha_j
  double weighted_sum_term = 0.0;
  /// 1 <= q <= p <= n
  bool ordered = false;
};

struct BlockReport {
  std::vector<BlockRow> rows;
  /// Per quantity (q/p, p/n, mixing, weighted sum): non-increasing across the
  /// grid and strictly smaller at the end (or identically zero).
  std::array<bool, 4> decreasing{};
  /// Per quantity: last / first < 0.5, or the last value is exactly zero.
  std::array<bool, 4> vanishing{};
  /// First grid n from which every row satisfies 1 <= q <= p <= n; 0 if none.
  long n0 = 0;
};

BlockReport check_block_conditions(const std::function<double(unsigned)>& alpha,
                                   const BlockSchedule& schedule,
                                   const std::vector<long>& n_grid);

}  // namespace qleague
