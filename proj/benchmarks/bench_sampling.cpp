#include <benchmark/benchmark.h>

#include <complex>
#include <vector>

#include "spectral_wick/density.hpp"
#include "spectral_wick/fft.hpp"
#include "spectral_wick/kernel.hpp"
#include "spectral_wick/rng.hpp"
#include "spectral_wick/sampling.hpp"

namespace sw = spectral_wick;

namespace {
std::vector<double> grid_times(int points, double t_max) {
  std::vector<double> t(static_cast<std::size_t>(points));
  for (int j = 0; j < points; ++j) {
    t[static_cast<std::size_t>(j)] = t_max * (j + 1) / points;
  }
  return t;
}
}  // namespace

static void BM_SampleCholesky(benchmark::State& state) {
  sw::KernelEvaluator kernel(sw::SpectralDensity::fractional(0.7));
  const auto times = grid_times(8, 2.0);
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        sw::sample_paths(kernel, times, n, 1, sw::SampleMethod::kCholesky));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(n));
}
BENCHMARK(BM_SampleCholesky)->RangeMultiplier(4)->Range(1024, 16384);

static void BM_SampleSpectral(benchmark::State& state) {
  sw::KernelEvaluator kernel(sw::SpectralDensity::fractional(0.7));
  const auto times = grid_times(8, 2.0);
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        sw::sample_paths(kernel, times, n, 1, sw::SampleMethod::kSpectral));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(n));
}
BENCHMARK(BM_SampleSpectral)->RangeMultiplier(4)->Range(1024, 16384);

static void BM_NormalStream(benchmark::State& state) {
  std::vector<double> out(static_cast<std::size_t>(state.range(0)));
  std::uint64_t stream = 0;
  for (auto _ : state) {
    sw::fill_normals(7, stream++, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          state.range(0));
}
BENCHMARK(BM_NormalStream)->Arg(1 << 12)->Arg(1 << 16);

static void BM_Fft(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<std::complex<double>> data(n);
  for (std::size_t j = 0; j < n; ++j) {
    data[j] = {std::sin(0.01 * static_cast<double>(j)), 0.0};
  }
  for (auto _ : state) {
    sw::fft::transform(data, false);
    sw::fft::transform(data, true);
    benchmark::DoNotOptimize(data.data());
  }
  state.SetComplexityN(static_cast<std::int64_t>(n));
}
BENCHMARK(BM_Fft)->RangeMultiplier(4)->Range(1 << 10, 1 << 16)->Complexity();
