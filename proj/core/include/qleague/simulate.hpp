#pragma once

// Monte Carlo league engine with quenched semantics: strengths are frozen in a
// QuenchedEnvironment, every replica redraws the tilting paths and match
// outcomes from streams keyed by (seed, purpose, replica, team).

#include <cstdint>
#include <span>
#include <vector>

#include "qleague/match_model.hpp"
#include "qleague/measures.hpp"
#include "qleague/processes.hpp"
#include "qleague/scheduling.hpp"

namespace qleague {

struct QuenchedEnvironment {
  int two_n = 0;
  double focal_strength = 0.0;
  /// Strengths of teams 1..2n-1 (team 0 is the focal team).
  std::vector<double> strengths;
  Measure mu = Measure::point(1.0);
  std::uint64_t master_seed = 0;
};

QuenchedEnvironment draw_environment(const Measure& mu, int two_n, double s,
                                     std::uint64_t master_seed);

/// Builds an environment from explicitly supplied strengths (e.g. imported
/// from CSV); `mu` is recorded as provenance only.
QuenchedEnvironment make_environment(std::vector<double> strengths, double s,
                                     const Measure& mu, std::uint64_t master_seed);

enum class SimMode { focal, full };

struct ReplicaResult {
  int wins_focal = 0;
  /// Full mode only: wins of every team, indexed by team.
  std::vector<int> wins_all;

  friend bool operator==(const ReplicaResult&, const ReplicaResult&) = default;
};

std::vector<ReplicaResult> run_replicas(const QuenchedEnvironment& env,
                                        const TiltingProcess& proc, const WinFunction& w,
                                        std::size_t replicas, SimMode mode,
                                        unsigned threads = 1);

/// Plays every match of `calendar` once. strengths[i] is team i's initial
/// strength; returns the win count of every team.
std::vector<int> play_full_league(std::span<const double> strengths, const Calendar& calendar,
                                  const TiltingProcess& proc, const WinFunction& w,
                                  std::uint64_t master_seed, std::uint64_t replica);

/// Exact quenched mean of W_n(s): sum_j E[F_s(V, s_j)].
double expected_wins_quenched(const QuenchedEnvironment& env, const Measure& nu,
                              const WinFunction& w, double tol);

enum class CalendarKind { circle, canonical };

struct RankingEntry {
  std::size_t rank_index = 0;
  double strength = 0.0;
  double mean_win_fraction = 0.0;
};

/// All 2n strengths drawn i.i.d. from mu; teams sorted weakest to strongest,
/// entry i the replica mean of wins / 2n for the i-th weakest team.
std::vector<RankingEntry> ranking_curve(const Measure& mu, int two_n, const TiltingProcess& proc,
                                        const WinFunction& w, std::size_t replicas,
                                        std::uint64_t master_seed,
                                        CalendarKind calendar = CalendarKind::circle,
                                        unsigned threads = 1);

}  // namespace qleague
