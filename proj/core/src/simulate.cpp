#include "qleague/simulate.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "qleague/error.hpp"
#include "qleague/parallel.hpp"

namespace qleague {
namespace {

void check_two_n(int two_n) {
  if (two_n < 2 || two_n % 2 != 0)
    throw InvalidArgument("two_n must be even and >= 2, got " + std::to_string(two_n));
}

[[noreturn]] void rethrow_with_context(const DomainError& e, std::uint64_t replica, std::size_t day,
                                       int i, int j) {
  std::ostringstream os;
  os << e.what() << " (replica " << replica << ", day " << day << ", match " << i << " vs " << j
     << ")";
  throw DomainError(os.str());
}

int play_focal(const QuenchedEnvironment& env, const TiltingProcess& proc, const WinFunction& w,
               std::uint64_t replica) {
  const auto days = static_cast<std::size_t>(env.two_n - 1);
  Stream own = Stream::derive(env.master_seed, "replica", replica, 0);
  const std::vector<double> xi0 = proc.sample_path(days, own);
  Stream outcome = Stream::derive(env.master_seed, "outcome", replica);
  int wins = 0;
  // Canonical calendar: on day j the focal team meets team j.
  for (std::size_t j = 1; j <= days; ++j) {
    Stream opp = Stream::derive(env.master_seed, "replica", replica, j);
    const double xij = proc.sample_marginal(opp);
    double p = 0.0;
    try {
      p = w(env.focal_strength * xi0[j - 1], env.strengths[j - 1] * xij);
    } catch (const DomainError& e) {
      rethrow_with_context(e, replica, j, 0, static_cast<int>(j));
    }
    if (outcome.uniform() < p) ++wins;
  }
  return wins;
}

}  // namespace

QuenchedEnvironment draw_environment(const Measure& mu, int two_n, double s,
                                     std::uint64_t master_seed) {
  check_two_n(two_n);
  if (!(s >= 0.0)) throw InvalidArgument("focal strength must be >= 0");
  QuenchedEnvironment env;
  env.two_n = two_n;
  env.focal_strength = s;
  env.mu = mu;
  env.master_seed = master_seed;
  Stream rng = Stream::derive(master_seed, "strengths");
  env.strengths.reserve(static_cast<std::size_t>(two_n - 1));
  for (int i = 1; i < two_n; ++i) env.strengths.push_back(mu.sample(rng));
  return env;
}

QuenchedEnvironment make_environment(std::vector<double> strengths, double s, const Measure& mu,
                                     std::uint64_t master_seed) {
  const int two_n = static_cast<int>(strengths.size()) + 1;
  check_two_n(two_n);
  if (!(s >= 0.0)) throw InvalidArgument("focal strength must be >= 0");
  for (double x : strengths)
    if (!(x >= 0.0)) throw InvalidArgument("strengths must be >= 0");
  QuenchedEnvironment env;
  env.two_n = two_n;
  env.focal_strength = s;
  env.strengths = std::move(strengths);
  env.mu = mu;
  env.master_seed = master_seed;
  return env;
}

std::vector<int> play_full_league(std::span<const double> strengths, const Calendar& calendar,
                                  const TiltingProcess& proc, const WinFunction& w,
                                  std::uint64_t master_seed, std::uint64_t replica) {
  const auto n = static_cast<std::size_t>(calendar.n_teams());
  if (strengths.size() != n) throw InvalidArgument("one strength per team required");
  const std::size_t days = calendar.n_rounds();
  std::vector<std::vector<double>> xi(n);
  for (std::size_t i = 0; i < n; ++i) {
    Stream rng = Stream::derive(master_seed, "replica", replica, i);
    xi[i] = proc.sample_path(days, rng);
  }
  Stream outcome = Stream::derive(master_seed, "outcome", replica);
  std::vector<int> wins(n, 0);
  for (std::size_t day = 0; day < days; ++day) {
    for (const Match& m : calendar.round(day)) {
      const auto i = static_cast<std::size_t>(m.first);
      const auto j = static_cast<std::size_t>(m.second);
      double p = 0.0;
      try {
        p = w(strengths[i] * xi[i][day], strengths[j] * xi[j][day]);
      } catch (const DomainError& e) {
        rethrow_with_context(e, replica, day + 1, m.first, m.second);
      }
      if (outcome.uniform() < p) ++wins[i];
      else ++wins[j];
    }
  }
  return wins;
}

std::vector<ReplicaResult> run_replicas(const QuenchedEnvironment& env,
                                        const TiltingProcess& proc, const WinFunction& w,
                                        std::size_t replicas, SimMode mode, unsigned threads) {
  check_two_n(env.two_n);
  if (env.strengths.size() != static_cast<std::size_t>(env.two_n - 1))
    throw InvalidArgument("environment needs two_n - 1 opponent strengths");
  if (replicas == 0) throw InvalidArgument("replicas must be >= 1");
  std::vector<ReplicaResult> results(replicas);
  if (mode == SimMode::focal) {
    parallel_for(replicas, threads, [&](std::size_t r) {
      results[r].wins_focal = play_focal(env, proc, w, r);
    });
    return results;
  }
  const Calendar calendar = circle_calendar(env.two_n);
  std::vector<double> all;
  all.reserve(static_cast<std::size_t>(env.two_n));
  all.push_back(env.focal_strength);
  all.insert(all.end(), env.strengths.begin(), env.strengths.end());
  parallel_for(replicas, threads, [&](std::size_t r) {
    results[r].wins_all = play_full_league(all, calendar, proc, w, env.master_seed, r);
    results[r].wins_focal = results[r].wins_all[0];
  });
  return results;
}

double expected_wins_quenched(const QuenchedEnvironment& env, const Measure& nu,
                              const WinFunction& w, double tol) {
  const Kernel kernel(w, nu);
  const double per_term = tol / static_cast<double>(env.two_n);
  double total = 0.0;
  for (double sj : env.strengths) total += kernel.G(env.focal_strength, sj, per_term);
  return total;
}

std::vector<RankingEntry> ranking_curve(const Measure& mu, int two_n, const TiltingProcess& proc,
                                        const WinFunction& w, std::size_t replicas,
                                        std::uint64_t master_seed, CalendarKind calendar_kind,
                                        unsigned threads) {
  check_two_n(two_n);
  if (replicas == 0) throw InvalidArgument("replicas must be >= 1");
  Stream rng = Stream::derive(master_seed, "league-strengths");
  std::vector<double> strengths;
  for (int i = 0; i < two_n; ++i) strengths.push_back(mu.sample(rng));
  const Calendar calendar = calendar_kind == CalendarKind::circle
                                ? circle_calendar(two_n)
                                : canonical_focal_calendar(two_n);

  std::vector<std::vector<int>> wins(replicas);
  parallel_for(replicas, threads, [&](std::size_t r) {
    wins[r] = play_full_league(strengths, calendar, proc, w, master_seed, r);
  });

  std::vector<std::size_t> order(strengths.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return strengths[a] < strengths[b]; });
  std::vector<RankingEntry> curve;
  const double denom = static_cast<double>(replicas) * static_cast<double>(two_n);
  for (std::size_t k = 0; k < order.size(); ++k) {
    long long total = 0;
    for (std::size_t r = 0; r < replicas; ++r) total += wins[r][order[k]];
    curve.push_back({k, strengths[order[k]], static_cast<double>(total) / denom});
  }
  return curve;
}

}  // namespace qleague
