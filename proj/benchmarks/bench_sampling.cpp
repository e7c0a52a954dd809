#include <benchmark/benchmark.h>

#include "phaseloss/measurement.hpp"

using namespace phaseloss;

static void BM_SampleHomodyne(benchmark::State& state) {
  const GaussianState s = make_probe({100.0, 2.0, 0.0, 0.0});
  for (auto _ : state) benchmark::DoNotOptimize(sample_homodyne(s, 0.0, state.range(0), 1));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SampleHomodyne)->Arg(100000);

static void BM_SampleIntensityExact(benchmark::State& state) {
  const IntensitySampler sampler(make_probe({4.0, 0.5, 0.0, 0.0}), IntensityMode::ExactFock);
  SplitMix64 rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(sampler.sample(state.range(0), rng));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SampleIntensityExact)->Arg(100000);

static void BM_HomodyneExperiment(benchmark::State& state) {
  ExperimentConfig c;
  c.probe = {100.0, 0.0, 0.0, 0.0};
  c.channel = {0.8, 0.0, 0.0, 1.0};
  c.samples = 100000;
  c.trials = 20;
  c.sufficient_statistics = state.range(0) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(run_experiment(c));
}
BENCHMARK(BM_HomodyneExperiment)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
