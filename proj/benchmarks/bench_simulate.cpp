#include <benchmark/benchmark.h>

#include "qleague/simulate.hpp"

using namespace qleague;

static void BM_FocalReplicas(benchmark::State& state) {
  const QuenchedEnvironment env = draw_environment(Measure::uniform(0.0, 1.0), static_cast<int>(state.range(0)), 0.5, 1);
  const TiltingProcess proc(MarkovTilting::two_state(0.5, 2.0, 0.4, 0.4));
  for (auto _ : state) benchmark::DoNotOptimize(run_replicas(env, proc, WinFunction::ratio(), 100, SimMode::focal));
  state.SetItemsProcessed(state.iterations() * 100 * state.range(0));
}
BENCHMARK(BM_FocalReplicas)->Arg(200)->Arg(2000)->Arg(20000);

static void BM_FullReplicas(benchmark::State& state) {
  const QuenchedEnvironment env = draw_environment(Measure::uniform(0.0, 1.0), static_cast<int>(state.range(0)), 0.5, 1);
  const TiltingProcess proc(MarkovTilting::two_state(0.5, 2.0, 0.4, 0.4));
  for (auto _ : state) benchmark::DoNotOptimize(run_replicas(env, proc, WinFunction::ratio(), 4, SimMode::full));
}
BENCHMARK(BM_FullReplicas)->Arg(100)->Arg(400);
