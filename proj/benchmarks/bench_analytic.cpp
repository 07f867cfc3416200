#include <benchmark/benchmark.h>

#include "qleague/analytic.hpp"

using namespace qleague;

static void BM_Ell(benchmark::State& state) {
  const Measure nu = Measure::discrete({{0.5, 0.5}, {2.0, 0.5}});
  for (auto _ : state) benchmark::DoNotOptimize(ell(WinFunction::ratio(), nu, Measure::uniform(0.0, 1.0), 0.5, 1e-10));
}
BENCHMARK(BM_Ell);

static void BM_Rho2Markov(benchmark::State& state) {
  const double p = static_cast<double>(state.range(0)) / 100.0;
  const MarkovTilting chain = MarkovTilting::two_state(0.5, 2.0, p, p);
  const BoundedKernel g = win_kernel(WinFunction::ratio(), chain.marginal(), 0.5, 1e-12);
  for (auto _ : state) benchmark::DoNotOptimize(rho2_markov(g, chain, Measure::uniform(0.0, 1.0), 1e-10));
}
BENCHMARK(BM_Rho2Markov)->Arg(40)->Arg(92)->Arg(99);
