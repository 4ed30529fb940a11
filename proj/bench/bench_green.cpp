// Serial reference vs OpenMP Green matrix assembly, plus the two tension
// solves that use them.

#include "whip/kernels.hpp"
#include "whip/tension.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

using namespace whip;

namespace {

ChainState wavy_chain(int n) {
  std::mt19937_64 rng(n);
  std::uniform_real_distribution<double> turn(-0.6, 0.6), speed(-2.0, 2.0);
  Mat links(2, n), vel(2, n);
  double th = 0.0;
  for (int k = 0; k < n; ++k) {
    th += turn(rng);
    const double w = speed(rng);
    links.col(k) << std::cos(th), std::sin(th);
    vel.col(k) << -std::sin(th) * w, std::cos(th) * w;
  }
  return ChainState::from_links(links, vel);
}

void BM_GreenReference(benchmark::State& state) {
  const AlphaBeta ab = compute_alpha_beta(wavy_chain(static_cast<int>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::green_reference(ab));
  state.SetComplexityN(state.range(0));
}

void BM_GreenParallel(benchmark::State& state) {
  const AlphaBeta ab = compute_alpha_beta(wavy_chain(static_cast<int>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::green_parallel(ab));
  state.SetComplexityN(state.range(0));
}

void BM_TensionDirect(benchmark::State& state) {
  const ChainState c = wavy_chain(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(solve_tension(c, TensionMethod::direct));
}

void BM_TensionGreen(benchmark::State& state) {
  const ChainState c = wavy_chain(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(solve_tension(c, TensionMethod::green));
}

}  // namespace

BENCHMARK(BM_GreenReference)->RangeMultiplier(2)->Range(16, 512)->Complexity(benchmark::oNCubed);
BENCHMARK(BM_GreenParallel)->RangeMultiplier(2)->Range(16, 2048)->Complexity(benchmark::oNSquared);
BENCHMARK(BM_TensionDirect)->RangeMultiplier(4)->Range(16, 4096);
BENCHMARK(BM_TensionGreen)->RangeMultiplier(4)->Range(16, 1024);

BENCHMARK_MAIN();
