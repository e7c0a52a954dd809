#include <benchmark/benchmark.h>

#include "phaseloss/fock.hpp"
#include "phaseloss/verify.hpp"

using namespace phaseloss;

static void BM_FockProbe(benchmark::State& state) {
  const ProbeSpec spec{4.0, 1.0, 0.3, 0.0};
  for (auto _ : state) benchmark::DoNotOptimize(fock_probe_auto(spec));
}
BENCHMARK(BM_FockProbe)->Unit(benchmark::kMillisecond);

static void BM_DenseDilation(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(dilation_unitary(0.7, 0.3, 0.5, dim));
}
BENCHMARK(BM_DenseDilation)->Arg(8)->Arg(16)->Arg(24)->Unit(benchmark::kMillisecond);

static void BM_SpectralDilation(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  const Dilation d(dim);
  const CVector psi = number_state(dim / 2, dim).amplitudes;
  for (auto _ : state) benchmark::DoNotOptimize(d.apply(psi, 0.7, 0.3, 0.5));
}
BENCHMARK(BM_SpectralDilation)->Arg(8)->Arg(16)->Arg(24)->Arg(64)->Unit(benchmark::kMicrosecond);

static void BM_VerifyCase(benchmark::State& state) {
  DilationCache cache;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        verify_identities(ProbeSpec{2.0, 0.5, 0.0, 0.0}, {0.7, 0.2, 0.5, 1.0}, {}, "bench", &cache));
  }
}
BENCHMARK(BM_VerifyCase)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
