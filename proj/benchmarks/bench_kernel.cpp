#include <benchmark/benchmark.h>

#include <vector>

#include "spectral_wick/density.hpp"
#include "spectral_wick/kernel.hpp"

namespace sw = spectral_wick;

namespace {

sw::SpectralDensity density_for(int kind) {
  switch (kind) {
    case 0: return sw::SpectralDensity::white();
    case 1: return sw::SpectralDensity::band_limited(1.0);
    case 2: return sw::SpectralDensity::fractional(0.7);
    default: return sw::SpectralDensity::band_limited_fractional(0.7, 4.0);
  }
}

const char* density_name(int kind) {
  switch (kind) {
    case 0: return "white";
    case 1: return "band_limited";
    case 2: return "fractional";
    default: return "band_limited_fractional";
  }
}

}  // namespace

// Cold variance evaluation: full graded + oscillatory quadrature per call.
static void BM_VarianceCold(benchmark::State& state) {
  const auto m = density_for(static_cast<int>(state.range(0)));
  double t = 0.1;
  for (auto _ : state) {
    // A fresh evaluator each iteration defeats the value cache.
    sw::KernelEvaluator eval(m);
    benchmark::DoNotOptimize(eval.variance_r(t));
    t += 1e-3;  // avoid hitting identical arguments
  }
  state.SetLabel(density_name(static_cast<int>(state.range(0))));
}
BENCHMARK(BM_VarianceCold)->DenseRange(0, 3);

// Warm evaluation through the per-evaluator cache.
static void BM_VarianceCached(benchmark::State& state) {
  const auto m = density_for(static_cast<int>(state.range(0)));
  sw::KernelEvaluator eval(m);
  eval.variance_r(1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(eval.variance_r(1.0));
  }
  state.SetLabel(density_name(static_cast<int>(state.range(0))));
}
BENCHMARK(BM_VarianceCached)->DenseRange(0, 3);

// Dense Gram assembly over n grid times.
static void BM_Gram(benchmark::State& state) {
  const auto m = sw::SpectralDensity::fractional(0.7);
  const int n = static_cast<int>(state.range(0));
  std::vector<double> times(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    times[static_cast<std::size_t>(j)] = 4.0 * (j + 1) / n;
  }
  for (auto _ : state) {
    sw::KernelEvaluator eval(m);
    benchmark::DoNotOptimize(eval.gram(times));
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_Gram)->RangeMultiplier(2)->Range(16, 128)->Complexity();
