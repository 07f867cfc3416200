#include <gtest/gtest.h>

#include "qleague/error.hpp"
#include "qleague/match_model.hpp"

using namespace qleague;

TEST(WinFunction, Examples) {
  EXPECT_DOUBLE_EQ(WinFunction::ratio()(3, 3), 0.5);
  EXPECT_DOUBLE_EQ(WinFunction::ratio()(1, 3), 0.25);
  EXPECT_DOUBLE_EQ(WinFunction::transformed_ratio(1.3, 0.999)(0.5, 0.5), 0.5);
  EXPECT_EQ(WinFunction::ratio()(0, 2), 0.0);
  EXPECT_THROW(WinFunction::ratio()(0, 0), DomainError);
}

TEST(WinFunction, AntisymmetryAndRange) {
  const std::vector<WinFunction> fs = {WinFunction::ratio(), WinFunction::transformed_ratio(1.3, 0.999),
                                       WinFunction::transformed_ratio(2.0, 0.5),
                                       WinFunction::const_half()};
  Stream rng = Stream::derive(8, "grid");
  for (const WinFunction& f : fs)
    for (int i = 0; i < 100; ++i)
      for (int j = 0; j < 100; ++j) {
        const double x = 0.01 + 3.0 * rng.uniform(), y = 0.01 + 3.0 * rng.uniform();
        const double v = f(x, y);
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
        EXPECT_NEAR(v + f(y, x), 1.0, 1e-12);
      }
}

TEST(WinFunction, MonotoneOnGrid) {
  for (const WinFunction& f : {WinFunction::ratio(), WinFunction::transformed_ratio(1.3, 0.999)}) {
    EXPECT_TRUE(f.is_monotone());
    for (int i = 0; i < 60; ++i)
      for (int j = 0; j < 60; ++j) {
        const double x = 0.05 * (i + 1), y = 0.05 * (j + 1);
        EXPECT_LE(f(x, y), f(x + 0.05, y) + 1e-15);
        EXPECT_GE(f(x, y), f(x, y + 0.05) - 1e-15);
      }
  }
}

TEST(WinFunction, TransformedRatioSaturates) {
  const WinFunction f = WinFunction::transformed_ratio(1.3, 0.999);
  EXPECT_EQ(f(1.31, 0.4), f(5.0, 0.4));
}

TEST(WinFunction, TableInterpolatesAndClamps) {
  const WinFunction t = WinFunction::table({0, 1, 2}, {0, 1, 2},
                                           {{0.5, 0.25, 0.1}, {0.75, 0.5, 0.3}, {0.9, 0.7, 0.5}});
  EXPECT_DOUBLE_EQ(t(1, 1), 0.5);
  EXPECT_DOUBLE_EQ(t(0.5, 0), 0.625);
  EXPECT_DOUBLE_EQ(t(5, -1), 0.9);
  EXPECT_TRUE(t.is_monotone());
  // Near-antisymmetric grid: deviation bounded by the grid mismatch.
  for (double x = 0; x <= 2; x += 0.1)
    for (double y = 0; y <= 2; y += 0.1) EXPECT_LE(std::abs(t(x, y) + t(y, x) - 1.0), 0.05 + 1e-12);
}

TEST(WinFunction, RejectsBadParameters) {
  EXPECT_THROW(WinFunction::transformed_ratio(0.0, 0.5), InvalidArgument);
  EXPECT_THROW(WinFunction::transformed_ratio(1.0, 1.0), InvalidArgument);
  EXPECT_THROW(WinFunction::table({0, 1}, {0}, {{0.5}}), InvalidArgument);
}

TEST(Kernel, FExamples) {
  const Kernel half(WinFunction::const_half(), Measure::uniform(0.5, 2.0));
  EXPECT_DOUBLE_EQ(half.F(0.7, 1.3, 0.2, 1e-12), 0.5);
  const Kernel unit(WinFunction::ratio(), Measure::point(1.0));
  EXPECT_DOUBLE_EQ(unit.F(1, 1, 1, 1e-12), 0.5);
  const Kernel two(WinFunction::ratio(), Measure::discrete({{0.5, 0.5}, {2, 0.5}}));
  EXPECT_NEAR(two.F(1, 1, 1, 1e-12), 0.5 * (1 / 1.5) + 0.5 * (1.0 / 3.0), 1e-15);
}

TEST(Kernel, FTildeExamples) {
  const Kernel half(WinFunction::const_half(), Measure::discrete({{0.5, 0.5}, {2, 0.5}}));
  EXPECT_EQ(half.F_tilde(0.3, 0.8, 1.1, 1e-12), 0.0);
  const Kernel atom(WinFunction::ratio(), Measure::point(1.7));
  EXPECT_NEAR(atom.F_tilde(0.3, 1.7, 1.1, 1e-12), 0.0, 1e-16);
  const Kernel two(WinFunction::ratio(), Measure::discrete({{0.5, 0.5}, {2, 0.5}}));
  const double f05 = two.F(1, 0.5, 1, 1e-12), f2 = two.F(1, 2, 1, 1e-12);
  EXPECT_NEAR(two.F_tilde(1, 0.5, 1, 1e-12), f05 - (f05 + f2) / 2, 1e-15);
}

TEST(Kernel, CenteringInFirstArgument) {
  const Measure nu = Measure::discrete({{0.5, 0.3}, {1.0, 0.2}, {2.0, 0.5}});
  const Kernel k(WinFunction::transformed_ratio(1.3, 0.999), nu);
  Stream rng = Stream::derive(4, "center");
  const double tol = 1e-10;
  for (int i = 0; i < 1000; ++i) {
    const double s = 0.05 + rng.uniform(), y = 0.05 + rng.uniform();
    const double mean = nu.expect([&](double v) { return k.F_tilde(s, v, y, tol); }, tol);
    EXPECT_LE(std::abs(mean), 2 * tol);
  }
}

TEST(Kernel, FMonotone) {
  const Kernel k(WinFunction::ratio(), Measure::discrete({{0.5, 0.5}, {2, 0.5}}));
  for (int i = 1; i < 30; ++i)
    for (int j = 1; j < 30; ++j) {
      const double x = 0.1 * i, y = 0.1 * j;
      EXPECT_LE(k.F(0.7, x, y, 1e-12), k.F(0.7, x + 0.1, y, 1e-12) + 1e-15);
      EXPECT_GE(k.F(0.7, x, y, 1e-12), k.F(0.7, x, y + 0.1, 1e-12) - 1e-15);
    }
}
