#pragma once

// Fitting (f, mu, nu) to observed ranking curves.

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "qleague/match_model.hpp"
#include "qleague/measures.hpp"

namespace qleague {

struct RankingData {
  /// Mean points per rank, best team first.
  std::vector<double> mean_points;
  int matches_per_team = 1;
  double points_per_win = 1.0;

  /// Throws InvalidArgument unless length >= 2, points descending and every
  /// win fraction in [0, 1].
  void validate() const;
  /// mean_points / (points_per_win * matches_per_team), weakest team first.
  std::vector<double> win_fractions_ascending() const;
};

/// The Italian basketball means (16 teams, 30 matches, two points per win).
RankingData basketball_ranking();

struct ModelInstance {
  WinFunction win = WinFunction::ratio();
  Measure mu = Measure::uniform(0.0, 1.0);
  Measure nu = Measure::point(1.0);
};

/// The hand-tuned basketball instance: mu = U[0.1, 0.999], nu on {0.25, 1.3}
/// with weights 0.6 : 0.9 rescaled to 0.4 / 0.6, transformed ratio with
/// c1 = 1.3, c2 = 0.999.
ModelInstance basketball_instance();

/// entry i = ell(H_mu^-1((i + 1/2) / N)), strengths ascending.
std::vector<double> predicted_curve(const ModelInstance& instance, std::size_t n_points, double tol);

double rmse(std::span<const double> a, std::span<const double> b);

/// Least-squares line through (i, y_i); returns its RMSE.
double linear_fit_rmse(std::span<const double> y);

struct Parameter {
  double initial = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  bool free = false;

  static Parameter fixed(double value) { return {value, value, value, false}; }
  static Parameter boxed(double initial, double lower, double upper) {
    return {initial, lower, upper, true};
  }
};

struct FitSpec {
  /// ratio, transformed_ratio or const_half; c1 and c2 only matter for the
  /// transformed ratio.
  WinFunction::Kind family = WinFunction::Kind::transformed_ratio;
  Parameter c1 = Parameter::fixed(1.3);
  Parameter c2 = Parameter::fixed(0.999);
  Parameter mu_lo = Parameter::boxed(0.1, 0.0, 0.5);
  Parameter mu_hi = Parameter::boxed(0.999, 0.5, 2.0);
  /// Atom locations of nu.
  std::vector<Parameter> nu_atoms = {Parameter::fixed(0.25), Parameter::fixed(1.3)};
  /// nu weights = softmax(logits..., 0); one logit fewer than atoms.
  std::vector<Parameter> nu_logits = {Parameter::boxed(-0.405465108108, -4.0, 4.0)};

  /// Number of starting points: the initial values plus Halton points in the
  /// free-parameter box.
  std::size_t multistart = 6;
  std::size_t max_evals_per_start = 1500;
  /// Quadrature tolerance for each ell evaluation.
  double tol = 1e-8;
  unsigned threads = 1;

  std::size_t n_free() const;
  void validate() const;
};

/// Full parameter vector layout: c1, c2, mu_lo, mu_hi, nu_atoms..., nu_logits...
std::vector<std::string> parameter_names(const FitSpec& spec);
ModelInstance instance_from(const FitSpec& spec, std::span<const double> full_params);

struct TraceEntry {
  std::size_t start = 0;
  std::size_t evaluation = 0;
  double rmse = 0.0;
  std::vector<double> params;
};

struct FitResult {
  std::vector<std::string> names;
  std::vector<double> params;
  double rmse = 0.0;
  std::size_t best_start = 0;
  ModelInstance instance;
  std::vector<double> observed;
  std::vector<double> predicted;
  std::vector<TraceEntry> trace;
};

FitResult fit(const RankingData& data, const FitSpec& spec);

struct NelderMeadOptions {
  std::size_t max_evals = 1000;
  /// Stop when the spread of simplex values falls below this.
  double f_tol = 1e-12;
  /// Restart the simplex around the best vertex when it collapses below this
  /// diameter before max_evals.
  double x_tol = 1e-10;
  std::size_t max_restarts = 3;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  std::size_t evaluations = 0;
};

/// Box-constrained Nelder-Mead (reflection 1, expansion 2, contraction 0.5,
/// shrink 0.5; trial points clipped to [lower, upper]). `on_eval` sees every
/// evaluation.
NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& objective,
                             std::vector<double> start, std::span<const double> lower,
                             std::span<const double> upper, const NelderMeadOptions& options,
                             const std::function<void(std::span<const double>, double)>& on_eval = {});

}  // namespace qleague
