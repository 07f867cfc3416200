#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qleague/analytic.hpp"
#include "qleague/error.hpp"
#include "qleague/simulate.hpp"

using namespace qleague;

namespace {

const TiltingProcess kExample = MarkovTilting::two_state(0.5, 2.0, 0.5, 0.5);
const Measure kU01 = Measure::uniform(0.0, 1.0);

}  // namespace

TEST(Environment, Examples) {
  const auto ones = draw_environment(Measure::point(1.0), 10, 0.3, 5);
  EXPECT_EQ(ones.strengths, std::vector<double>(9, 1.0));
  EXPECT_EQ(ones.focal_strength, 0.3);
  EXPECT_EQ(draw_environment(kU01, 50, 1.0, 9).strengths, draw_environment(kU01, 50, 1.0, 9).strengths);
  const auto env = draw_environment(kU01, 2000, 1.0, 21);
  EXPECT_EQ(env.strengths.size(), 1999u);
  const double mean = std::accumulate(env.strengths.begin(), env.strengths.end(), 0.0) / 1999.0;
  EXPECT_NEAR(mean, 0.5, 0.02);
  EXPECT_THROW(draw_environment(kU01, 5, 1.0, 1), InvalidArgument);
}

TEST(Replicas, ConstantHalfBinomialMean) {
  const auto env = draw_environment(kU01, 4, 1.0, 3);
  const auto res = run_replicas(env, kExample, WinFunction::const_half(), 10000, SimMode::focal);
  double mean = 0.0;
  for (const auto& r : res) {
    EXPECT_GE(r.wins_focal, 0);
    EXPECT_LE(r.wins_focal, 3);
    mean += r.wins_focal;
  }
  mean /= 1e4;
  EXPECT_NEAR(mean, 1.5, 3 * std::sqrt(0.75 / 1e4));
}

TEST(Replicas, FairCoinsWhenEverythingEqual) {
  const auto env = make_environment(std::vector<double>(99, 1.0), 1.0, kU01, 11);
  const TiltingProcess flat(IIDTilting{Measure::point(1.0)});
  const auto res = run_replicas(env, flat, WinFunction::ratio(), 4000, SimMode::focal);
  double mean = 0.0, sq = 0.0;
  for (const auto& r : res) {
    mean += r.wins_focal;
    sq += double(r.wins_focal) * r.wins_focal;
  }
  mean /= 4000;
  const double var = sq / 4000 - mean * mean;
  EXPECT_NEAR(mean, 49.5, 3 * std::sqrt(24.75 / 4000));
  EXPECT_NEAR(var / 24.75, 1.0, 0.1);
}

TEST(Replicas, ExampleLlnAtTwoThousand) {
  const auto env = draw_environment(kU01, 2000, 1.0, 1234);
  const auto res = run_replicas(env, kExample, WinFunction::ratio(), 200, SimMode::focal);
  double mean = 0.0;
  for (const auto& r : res) mean += r.wins_focal / 2000.0;
  mean /= 200;
  EXPECT_NEAR(mean, ell(WinFunction::ratio(), kExample.marginal(), kU01, 1.0, 1e-10), 0.02);
}

TEST(Replicas, DeterministicAcrossThreadCounts) {
  const auto env = draw_environment(kU01, 40, 0.7, 77);
  for (SimMode mode : {SimMode::focal, SimMode::full}) {
    const auto one = run_replicas(env, kExample, WinFunction::ratio(), 64, mode, 1);
    const auto four = run_replicas(env, kExample, WinFunction::ratio(), 64, mode, 4);
    EXPECT_EQ(one, four);
  }
}

TEST(Replicas, FullModeConservesWins) {
  const auto env = draw_environment(kU01, 30, 0.5, 8);
  for (const auto& r : run_replicas(env, kExample, WinFunction::ratio(), 20, SimMode::full)) {
    EXPECT_EQ(std::accumulate(r.wins_all.begin(), r.wins_all.end(), 0), 30 * 29 / 2);
    EXPECT_EQ(r.wins_all[0], r.wins_focal);
  }
}

TEST(Replicas, RatioZeroZeroCarriesContext) {
  const auto env = make_environment({0.0}, 0.0, kU01, 1);
  try {
    run_replicas(env, TiltingProcess(IIDTilting{Measure::point(1.0)}), WinFunction::ratio(), 3,
                 SimMode::focal);
    FAIL() << "expected DomainError";
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("replica"), std::string::npos);
  }
}

TEST(QuenchedMean, Examples) {
  const auto env = draw_environment(kU01, 20, 0.4, 2);
  EXPECT_DOUBLE_EQ(expected_wins_quenched(env, kExample.marginal(), WinFunction::const_half(), 1e-9), 9.5);
  const auto equal = make_environment(std::vector<double>(19, 0.8), 0.8, kU01, 2);
  EXPECT_NEAR(expected_wins_quenched(equal, Measure::point(1.3), WinFunction::ratio(), 1e-9), 9.5, 1e-12);
}

TEST(QuenchedMean, MatchesReplicaMean) {
  const auto env = draw_environment(kU01, 200, 1.0, 55);
  const auto res = run_replicas(env, kExample, WinFunction::ratio(), 10000, SimMode::focal);
  double mean = 0.0, sq = 0.0;
  for (const auto& r : res) {
    mean += r.wins_focal;
    sq += double(r.wins_focal) * r.wins_focal;
  }
  mean /= 1e4;
  const double sd = std::sqrt((sq / 1e4 - mean * mean) / 1e4);
  EXPECT_NEAR(mean, expected_wins_quenched(env, kExample.marginal(), WinFunction::ratio(), 1e-9), 3 * sd);
}

TEST(Ranking, ConstantHalfFlat) {
  const auto curve = ranking_curve(kU01, 20, kExample, WinFunction::const_half(), 200, 6);
  ASSERT_EQ(curve.size(), 20u);
  // Each team plays 19 fair matches; entries are wins / 2n.
  const double sd = std::sqrt(19 * 0.25 / 200) / 20;
  for (const auto& e : curve) EXPECT_NEAR(e.mean_win_fraction, 19.0 / 40.0, 3.5 * sd);
}

double spearman(const std::vector<double>& v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> rank(n);
  for (std::size_t r = 0; r < n; ++r) rank[order[r]] = static_cast<double>(r);
  double d2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) d2 += (rank[i] - i) * (rank[i] - i);
  return 1.0 - 6.0 * d2 / (double(n) * (double(n) * n - 1));
}

TEST(Ranking, MonotoneUnderIidRatio) {
  const TiltingProcess iid(IIDTilting{Measure::discrete({{0.5, 0.5}, {2.0, 0.5}})});
  const auto curve = ranking_curve(kU01, 1000, iid, WinFunction::ratio(), 20, 13);
  std::vector<double> v;
  for (const auto& e : curve) v.push_back(e.mean_win_fraction);
  EXPECT_GT(spearman(v), 0.99);
  for (std::size_t i = 1; i < curve.size(); ++i) EXPECT_LE(curve[i - 1].strength, curve[i].strength);
}

TEST(Ranking, CalendarKindsAgreeInDistribution) {
  const auto a = ranking_curve(kU01, 200, kExample, WinFunction::ratio(), 10, 3, CalendarKind::circle);
  const auto b = ranking_curve(kU01, 200, kExample, WinFunction::ratio(), 10, 3, CalendarKind::canonical);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].strength, b[i].strength);
    EXPECT_NEAR(a[i].mean_win_fraction, b[i].mean_win_fraction, 0.12);
  }
}
