#include <benchmark/benchmark.h>

#include "qleague/random.hpp"
#include "qleague/stats.hpp"

using namespace qleague;

namespace {

std::vector<double> uniforms(std::size_t n) {
  Stream rng = Stream::derive(1, "bench");
  std::vector<double> x(n);
  for (double& v : x) v = rng.uniform();
  return x;
}

const ShiftKernel kProduct = ShiftKernel::product([](double a) { return a; }, [](double b) { return b; });

}  // namespace

static void BM_ShiftSumsFft(benchmark::State& state) {
  const std::vector<double> x = uniforms(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(shift_sums_fft(x, kProduct));
}
BENCHMARK(BM_ShiftSumsFft)->Arg(1 << 10)->Arg(1 << 14)->Arg(1 << 17);

static void BM_ShiftSumsDirect(benchmark::State& state) {
  const std::vector<double> x = uniforms(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(shift_sums_direct(x, kProduct));
}
BENCHMARK(BM_ShiftSumsDirect)->Arg(1 << 10)->Arg(1 << 12);
