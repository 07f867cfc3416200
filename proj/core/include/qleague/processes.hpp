#pragma once

// Stationary tilting processes: i.i.d. sequences and finite-state Markov chains
// started from their stationary law.

#include <Eigen/Dense>
#include <cstddef>
#include <optional>
#include <variant>
#include <vector>

#include "qleague/measures.hpp"
#include "qleague/random.hpp"

namespace qleague {

class MarkovTilting {
 public:
  static constexpr std::size_t kMaxStates = 16;

  /// Validates row-stochasticity (1e-12), irreducibility and aperiodicity,
  /// then solves for the stationary vector.
  MarkovTilting(std::vector<double> states, Eigen::MatrixXd transition);

  /// The two-state chain on {a, b} with P = [[pa, 1-pa], [1-pb, pb]].
  static MarkovTilting two_state(double a, double b, double pa, double pb);

  std::size_t size() const noexcept { return states_.size(); }
  const std::vector<double>& states() const noexcept { return states_; }
  const Eigen::MatrixXd& transition() const noexcept { return transition_; }
  const Eigen::VectorXd& stationary() const noexcept { return stationary_; }

  /// Law of xi_1 (the stationary distribution placed on the state values).
  Measure marginal() const;

  /// P^k by repeated squaring, accumulated in long double.
  Eigen::MatrixXd transition_power(unsigned k) const;
  /// Entry (i, j) = P(xi_1 = state_i, xi_{1+k} = state_j).
  Eigen::MatrixXd joint_law(unsigned k) const;

  /// sup over A in sigma(xi_1), B in sigma(xi_{1+n}) of |P(A cap B) - P(A)P(B)|.
  double alpha(unsigned n) const;
  /// Second-largest eigenvalue modulus of the transition matrix.
  double second_eigenvalue_modulus() const noexcept { return slem_; }
  /// Geometric envelope C * lambda^n dominating alpha(m) for m >= n.
  double alpha_tail_bound(unsigned n) const;
  double envelope_constant() const;

  /// Indices into states(); first index drawn from the stationary law.
  std::vector<std::size_t> sample_indices(std::size_t length, Stream& rng) const;
  std::size_t sample_stationary_index(Stream& rng) const;

  friend bool operator==(const MarkovTilting& l, const MarkovTilting& r) {
    return l.states_ == r.states_ && l.transition_.rows() == r.transition_.rows() &&
           l.transition_ == r.transition_;
  }

 private:
  std::vector<double> states_;
  Eigen::MatrixXd transition_;
  Eigen::VectorXd stationary_;
  std::vector<double> stationary_cdf_;
  std::vector<std::vector<double>> row_cdf_;
  double slem_ = 0.0;
};

struct IIDTilting {
  Measure marginal;

  friend bool operator==(const IIDTilting&, const IIDTilting&) = default;
};

/// Exhaustive two-coordinate alpha: enumerates every (A, B) pair of state
/// subsets. Exponential in both coordinates; meant for small chains and tests.
double alpha_bruteforce(const Eigen::MatrixXd& joint, const Eigen::VectorXd& marginal);

class TiltingProcess {
 public:
  TiltingProcess(IIDTilting iid) : impl_(std::move(iid)) {}  // NOLINT
  TiltingProcess(MarkovTilting chain) : impl_(std::move(chain)) {}  // NOLINT

  bool is_markov() const noexcept { return std::holds_alternative<MarkovTilting>(impl_); }
  const MarkovTilting* markov() const noexcept { return std::get_if<MarkovTilting>(&impl_); }
  const IIDTilting* iid() const noexcept { return std::get_if<IIDTilting>(&impl_); }

  Measure marginal() const;
  std::vector<double> sample_path(std::size_t length, Stream& rng) const;
  /// One draw of xi_p for a single index p (the marginal law, by stationarity).
  double sample_marginal(Stream& rng) const;
  double alpha(unsigned n) const;

  friend bool operator==(const TiltingProcess&, const TiltingProcess&) = default;

 private:
  std::variant<IIDTilting, MarkovTilting> impl_;
};

}  // namespace qleague
