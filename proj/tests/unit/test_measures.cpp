#include <gtest/gtest.h>

#include <cmath>

#include "qleague/error.hpp"
#include "qleague/measures.hpp"

using namespace qleague;

TEST(Measure, SingleAtomSamplesItsValue) {
  const Measure m = Measure::discrete({{2.0, 1.0}});
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Stream rng = Stream::derive(seed, "t");
    EXPECT_EQ(m.sample(rng), 2.0);
  }
}

TEST(Measure, UniformSampleStaysInSupport) {
  const Measure m = Measure::uniform(0.0, 1.0);
  Stream rng = Stream::derive(17, "t");
  for (int i = 0; i < 10000; ++i) {
    const double x = m.sample(rng);
    EXPECT_GE(x, 0.0);
    EXPECT_LT(x, 1.0);
  }
}

TEST(Measure, ConstantEmpiricalSamplesConstant) {
  const Measure m = Measure::empirical({1, 1, 1});
  Stream rng = Stream::derive(3, "t");
  for (int i = 0; i < 20; ++i) EXPECT_EQ(m.sample(rng), 1.0);
}

TEST(Measure, ExpectDiscreteWeightedMean) {
  const Measure m = Measure::discrete({{0.25, 0.5}, {1.3, 0.5}});
  EXPECT_NEAR(m.expect([](double x) { return x; }, 1e-12), 0.775, 1e-15);
}

TEST(Measure, ExpectUniformSquare) {
  const Measure m = Measure::uniform(0.0, 1.0);
  EXPECT_NEAR(m.expect([](double x) { return x * x; }, 1e-10), 1.0 / 3.0, 1e-10);
}

TEST(Measure, ExpectEmpiricalMean) {
  EXPECT_DOUBLE_EQ(Measure::empirical({1, 2, 3}).expect([](double x) { return x; }, 1e-9), 2.0);
}

TEST(Measure, ExpectBudgetExhaustionReportsError) {
  const Measure m = Measure::uniform(0.0, 1.0);
  auto wild = [](double x) { return std::sin(1.0 / (x + 1e-9)); };
  try {
    m.expect(wild, 1e-15);
    FAIL() << "expected QuadratureError";
  } catch (const QuadratureError& e) {
    EXPECT_GT(e.achieved_error(), 0.0);
  }
}

TEST(Measure, InverseCdfExamples) {
  EXPECT_DOUBLE_EQ(Measure::uniform(0.0, 1.0).inverse_cdf(0.37), 0.37);
  const Measure d = Measure::discrete({{1, 0.5}, {2, 0.5}});
  EXPECT_EQ(d.inverse_cdf(0.5), 1.0);
  EXPECT_EQ(d.inverse_cdf(0.7), 2.0);
  EXPECT_EQ(d.inverse_cdf(1.0), 2.0);
}

// Brute-force scan of the CDF steps as an oracle for the generalized inverse.
TEST(Measure, InverseCdfMatchesStepScan) {
  const Measure d = Measure::discrete({{0.3, 0.1}, {1.0, 0.25}, {1.7, 0.4}, {4.0, 0.25}});
  const std::vector<double> values = {0.3, 1.0, 1.7, 4.0};
  for (int i = 1; i <= 1000; ++i) {
    const double x = i / 1000.0;
    double scan = values.back();
    for (double v : values)
      if (d.cdf(v) >= x) {
        scan = v;
        break;
      }
    EXPECT_EQ(d.inverse_cdf(x), scan) << "x=" << x;
  }
}

TEST(Measure, InverseCdfOfCdfNotAboveAtom) {
  const Measure d = Measure::discrete({{0.5, 0.2}, {0.9, 0.3}, {2.5, 0.5}});
  for (const Atom& a : d.atoms()) EXPECT_LE(d.inverse_cdf(d.cdf(a.value)), a.value);
}

TEST(Measure, InverseCdfMonotone) {
  const Measure d = Measure::discrete({{0.5, 0.2}, {0.9, 0.3}, {2.5, 0.5}});
  const Measure u = Measure::uniform(0.2, 3.0);
  const Measure e = Measure::empirical({3, 1, 2, 2, 5});
  for (const Measure* m : {&d, &u, &e}) {
    double prev = -1.0;
    for (int i = 0; i <= 500; ++i) {
      const double q = m->inverse_cdf(i / 500.0);
      EXPECT_GE(q, prev);
      prev = q;
    }
  }
}

TEST(Measure, UniformMonteCarloMean) {
  const Measure m = Measure::uniform(0.0, 1.0);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    Stream rng = Stream::derive(seed, "mc");
    double sum = 0.0;
    for (int i = 0; i < 1000000; ++i) sum += m.sample(rng);
    EXPECT_NEAR(sum / 1e6, 0.5, 0.003);
  }
}

TEST(Measure, ExpectLinearOnDiscrete) {
  const Measure m = Measure::discrete({{0.1, 0.3}, {0.7, 0.3}, {3.0, 0.4}});
  auto h1 = [](double x) { return std::sin(x); };
  auto h2 = [](double x) { return x * x - 1.0; };
  const double a = 2.5, b = -0.75;
  const double lhs = m.expect([&](double x) { return a * h1(x) + b * h2(x); }, 1e-12);
  const double rhs = a * m.expect(h1, 1e-12) + b * m.expect(h2, 1e-12);
  EXPECT_NEAR(lhs, rhs, 1e-10);
}

TEST(Measure, WeightsNearOneRenormalizeOthersRejected) {
  const Measure m = Measure::discrete({{1.0, 0.5}, {2.0, 0.5000004}});
  EXPECT_NEAR(m.atoms()[0].weight + m.atoms()[1].weight, 1.0, 1e-15);
  EXPECT_THROW(Measure::discrete({{0.25, 0.6}, {1.3, 0.9}}), InvalidArgument);
}

TEST(Measure, NormalizedLoaderRescalesAndFlags) {
  bool rescaled = false;
  const Measure m = Measure::discrete_normalized({{0.25, 0.6}, {1.3, 0.9}}, &rescaled);
  EXPECT_TRUE(rescaled);
  EXPECT_NEAR(m.atoms()[0].weight, 0.4, 1e-15);
  EXPECT_NEAR(m.atoms()[1].weight, 0.6, 1e-15);
}

TEST(Measure, RejectsInvalidConstruction) {
  EXPECT_THROW(Measure::uniform(1.0, 1.0), InvalidArgument);
  EXPECT_THROW(Measure::uniform(-0.1, 1.0), InvalidArgument);
  EXPECT_THROW(Measure::empirical({}), InvalidArgument);
  EXPECT_THROW(Measure::empirical({1.0, -2.0}), InvalidArgument);
  EXPECT_THROW(Measure::discrete({{-1.0, 1.0}}), InvalidArgument);
  EXPECT_THROW(Measure::discrete({}), InvalidArgument);
}
