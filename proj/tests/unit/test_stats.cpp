#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qleague/error.hpp"
#include "qleague/random.hpp"
#include "qleague/stats.hpp"

using namespace qleague;

namespace {

std::vector<double> normals(std::uint64_t seed, std::size_t n, double sd = 1.0) {
  Stream rng = Stream::derive(seed, "test-normals");
  std::vector<double> out(n);
  for (double& x : out) x = sd * rng.normal();
  return out;
}

std::vector<double> uniforms(std::uint64_t seed, std::size_t n) {
  Stream rng = Stream::derive(seed, "test-uniforms");
  std::vector<double> out(n);
  for (double& x : out) x = rng.uniform();
  return out;
}

}  // namespace

TEST(NormalCdf, KnownValues) {
  EXPECT_DOUBLE_EQ(normal_cdf(0.0), 0.5);
  EXPECT_NEAR(normal_cdf(1.96), 0.9750021048517795, 1e-14);
  EXPECT_NEAR(normal_cdf(-1.0) + normal_cdf(1.0), 1.0, 1e-15);
}

TEST(Ks, NullPassRate) {
  int passes = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed)
    passes += ks_against_normal(normals(seed, 10000), 1.0).pass;
  EXPECT_GE(passes, 18);
}

TEST(Ks, ConstantZeroFails) {
  const std::vector<double> zeros(1000, 0.0);
  const NormalityReport r = ks_against_normal(zeros, 1.0);
  EXPECT_NEAR(r.ks_statistic, 0.5, 1e-12);
  EXPECT_FALSE(r.pass);
}

TEST(Ks, WrongVarianceFails) {
  const NormalityReport r = ks_against_normal(normals(5, 10000, std::sqrt(2.0)), 1.0);
  EXPECT_FALSE(r.var_pass);
  EXPECT_FALSE(r.pass);
}

TEST(Ks, PermutationInvariant) {
  std::vector<double> x = normals(9, 2000);
  const double a = ks_statistic_normal(x, 1.0);
  std::reverse(x.begin(), x.end());
  std::rotate(x.begin(), x.begin() + 713, x.end());
  EXPECT_EQ(ks_statistic_normal(x, 1.0), a);
}

TEST(Ks, ReportsSampleMoments) {
  const std::vector<double> x = normals(12, 5000);
  const NormalityReport r = ks_against_normal(x, 1.0);
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  EXPECT_NEAR(r.sample_mean, mean, 1e-12);
  EXPECT_NEAR(r.sample_var, ss / (x.size() - 1), 1e-12);
  EXPECT_NEAR(r.ks_threshold, 1.36 / std::sqrt(5000.0), 1e-15);
}

TEST(Ks, BadInputs) {
  EXPECT_THROW(ks_statistic_normal(std::vector<double>{}, 1.0), InvalidArgument);
  EXPECT_THROW(ks_statistic_normal(std::vector<double>{1.0}, 0.0), InvalidArgument);
  EXPECT_THROW(ks_against_normal(std::vector<double>(50, 0.0), 1.0), InvalidArgument);
}

TEST(CltWins, ConstantHalfMatchesQuarter) {
  const QuenchedEnvironment env = draw_environment(Measure::uniform(0.0, 1.0), 400, 0.5, 77);
  const TiltingProcess proc(MarkovTilting::two_state(0.5, 2.0, 0.4, 0.4));
  LimitReport rep;
  rep.sigma2 = 0.25;
  const CltOptions opts{.seed = 78};
  EXPECT_TRUE(clt_check_wins(env, proc, WinFunction::const_half(), 2000, rep, opts).pass);
  rep.sigma2 = 0.125;
  EXPECT_FALSE(clt_check_wins(env, proc, WinFunction::const_half(), 2000, rep, opts).pass);
}

TEST(CltWins, IidHalfCasePasses) {
  const QuenchedEnvironment env = draw_environment(Measure::uniform(0.0, 1.0), 2000, 1.0, 91);
  const TiltingProcess proc(MarkovTilting::two_state(0.5, 2.0, 0.5, 0.5));
  const LimitReport rep = limit_report(WinFunction::ratio(), proc, Measure::uniform(0.0, 1.0), 1.0, 1e-10);
  EXPECT_GT(rep.rho2, 0.0);
  EXPECT_TRUE(clt_check_wins(env, proc, WinFunction::ratio(), 5000, rep, {.seed = 92}).pass);
}

TEST(CltWins, TooFewReplicas) {
  const QuenchedEnvironment env = draw_environment(Measure::uniform(0.0, 1.0), 20, 0.5, 1);
  const TiltingProcess proc(IIDTilting{Measure::point(1.0)});
  EXPECT_THROW(clt_check_wins(env, proc, WinFunction::ratio(), 999, LimitReport{}, {}), InvalidArgument);
}

TEST(CltWins, StandardizedAreCentred) {
  const QuenchedEnvironment env = draw_environment(Measure::uniform(0.0, 1.0), 200, 0.7, 3);
  const TiltingProcess proc(MarkovTilting::two_state(0.5, 2.0, 0.4, 0.4));
  const std::vector<double> z = standardized_wins(env, proc, WinFunction::ratio(), 4000, {.seed = 4});
  const double mean = std::accumulate(z.begin(), z.end(), 0.0) / z.size();
  EXPECT_LT(std::abs(mean), 4.0 * 0.5 / std::sqrt(4000.0));
}

TEST(Gsum, ConstantKernelIsDegenerate) {
  const BoundedKernel g{[](double, double) { return 0.3; }, 1.0};
  const TiltingProcess proc(MarkovTilting::two_state(0.5, 2.0, 0.9, 0.9));
  const std::vector<double> s = uniforms(2, 99);
  for (double x : gsum_samples(g, proc, s, 50, 3)) EXPECT_NEAR(x, 0.0, 1e-12);
  const GsumCheck c = clt_check_gsum(g, proc, Measure::uniform(0.0, 1.0), s, 1000, {.seed = 3});
  EXPECT_TRUE(c.normality.degenerate);
  EXPECT_TRUE(c.normality.pass);
  EXPECT_NEAR(c.rho2, 0.0, 1e-12);
}

TEST(Gsum, IidIndicatorVariance) {
  const BoundedKernel g{[](double x, double) { return x >= 1.0 ? 1.0 : 0.0; }, 1.0};
  const TiltingProcess proc(IIDTilting{Measure::discrete({{0.5, 0.5}, {2.0, 0.5}})});
  int passes = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const GsumCheck c = clt_check_gsum(g, proc, Measure::uniform(0.0, 1.0), uniforms(100 + seed, 3999), 3000,
                                       {.seed = seed});
    EXPECT_NEAR(c.rho2, 0.25, 1e-12);
    EXPECT_TRUE(c.normality.var_pass) << c.normality.sample_var;
    passes += c.normality.pass;
  }
  EXPECT_GE(passes, 7);
}

TEST(Gsum, StickyChainMatchesRho2) {
  const MarkovTilting chain = MarkovTilting::two_state(0.5, 2.0, 0.92, 0.92);
  const Measure mu = Measure::uniform(0.0, 1.0);
  const BoundedKernel g = win_kernel(WinFunction::ratio(), chain.marginal(), 0.5, 1e-12);
  const double target = rho2_markov(g, chain, mu, 1e-10).rho2;
  int passes = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const GsumCheck c = clt_check_gsum(g, TiltingProcess(chain), mu, uniforms(100 + seed, 3999), 2000, {.seed = seed});
    EXPECT_NEAR(c.rho2, target, 1e-9);
    passes += c.normality.pass;
  }
  EXPECT_GE(passes, 8);
}

TEST(Shift, FftMatchesDirect) {
  const std::vector<double> x = uniforms(21, 256);
  ShiftKernel h = ShiftKernel::product([](double a) { return std::cos(a); }, [](double b) { return b * b; });
  h.separable.emplace_back([](double a) { return a; }, [](double b) { return 1.0 - b; });
  const std::vector<double> d = shift_sums_direct(x, h);
  const std::vector<double> f = shift_sums_fft(x, h);
  ASSERT_EQ(d.size(), f.size());
  ASSERT_EQ(d.size(), 128u);
  for (std::size_t k = 0; k < d.size(); ++k) EXPECT_NEAR(f[k], d[k], 1e-10);
}

TEST(Shift, ConstantKernel) {
  const std::vector<double> x = uniforms(1, 400);
  const ShiftDeviation dev = uniform_shift_deviation(x, ShiftKernel::general([](double, double) { return 0.7; }), 1.0);
  EXPECT_NEAR(dev.sup_dev, 0.0, 1e-14);
  EXPECT_NEAR(dev.mean_estimate, 0.7, 1e-14);
  EXPECT_TRUE(dev.concentration_ok);
}

TEST(Shift, ProductConcentrates) {
  const std::vector<double> x = uniforms(5, 20000);
  const ShiftDeviation dev =
      uniform_shift_deviation(x, ShiftKernel::product([](double a) { return a; }, [](double b) { return b; }), 1.0);
  EXPECT_LT(dev.sup_dev, dev.eps_star);
  EXPECT_TRUE(dev.concentration_ok);
  EXPECT_NEAR(dev.mean_estimate, 0.25, 0.02);
}

TEST(Shift, BoundViolationThrows) {
  const std::vector<double> x = uniforms(5, 100);
  EXPECT_THROW(uniform_shift_deviation(x, ShiftKernel::general([](double a, double b) { return 3 * a * b + 1; }), 1.0),
               InvalidArgument);
  EXPECT_THROW(uniform_shift_deviation(std::vector<double>(7, 0.5), ShiftKernel::general([](double, double) { return 0.0; }), 1.0),
               InvalidArgument);
}

TEST(Shift, DeviationShrinksWithN) {
  const ShiftKernel h = ShiftKernel::product([](double a) { return a; }, [](double b) { return b; });
  std::vector<double> small, large;
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    small.push_back(uniform_shift_deviation(uniforms(100 + seed, 4000), h, 1.0).sup_dev);
    large.push_back(uniform_shift_deviation(uniforms(200 + seed, 8000), h, 1.0).sup_dev);
  }
  std::nth_element(small.begin(), small.begin() + 7, small.end());
  std::nth_element(large.begin(), large.begin() + 7, large.end());
  EXPECT_LT(large[7], small[7]);
}

TEST(SupDistance, Basic) {
  EXPECT_DOUBLE_EQ(sup_distance(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2.5, 2}), 1.0);
  EXPECT_THROW(sup_distance(std::vector<double>{1}, std::vector<double>{}), InvalidArgument);
}
