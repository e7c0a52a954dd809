#include <benchmark/benchmark.h>

#include "phaseloss/bounds.hpp"
#include "phaseloss/figures.hpp"
#include "phaseloss/multipass.hpp"

using namespace phaseloss;

static void BM_OptimalSqueezingCple(benchmark::State& state) {
  const double n = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(optimal_squeezing_cple(0.7, n));
}
BENCHMARK(BM_OptimalSqueezingCple)->Arg(1)->Arg(10000)->Arg(100000000);

static void BM_DaeOptimalSqueezing(benchmark::State& state) {
  const double n = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(dae_optimal_squeezing(n));
}
BENCHMARK(BM_DaeOptimalSqueezing)->Arg(1)->Arg(10000)->Arg(100000000);

static void BM_GaussianQfi(benchmark::State& state) {
  const ChannelPoint ch{0.7, 0.2, 0.5, 1.0};
  const ProbeSpec spec{4.0, 1.0, 0.3, 0.1};
  for (auto _ : state) benchmark::DoNotOptimize(gaussian_qfi(ch, spec));
}
BENCHMARK(BM_GaussianQfi);

static void BM_Figure2b(benchmark::State& state) {
  const auto eta = open_eta_grid(999);
  const auto levels = default_photon_levels();
  for (auto _ : state) benchmark::DoNotOptimize(figure_2b(eta, levels));
}
BENCHMARK(BM_Figure2b)->Unit(benchmark::kMillisecond);

static void BM_OptimalPasses(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        optimal_passes({0.99, 0.0, 0.0, 1.0}, MultipassSetup{}, PassObjective::PerLostPhoton));
  }
}
BENCHMARK(BM_OptimalPasses);

BENCHMARK_MAIN();
