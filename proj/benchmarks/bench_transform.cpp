#include <benchmark/benchmark.h>

#include "spectral_wick/density.hpp"
#include "spectral_wick/ito.hpp"
#include "spectral_wick/s_transform.hpp"
#include "spectral_wick/verify.hpp"

namespace sw = spectral_wick;

// One-time probe construction: spectrum fit plus Chebyshev proxies.
static void BM_ProbeBuild(benchmark::State& state) {
  const auto m = sw::SpectralDensity::fractional(0.7);
  for (auto _ : state) {
    sw::Probe s(m, {}, 0.3, 0.7, 1.0);
    benchmark::DoNotOptimize(s.norm_sq());
  }
}
BENCHMARK(BM_ProbeBuild);

// Running pairing evaluations against a masked window (the inner loop of
// every numeric transform integral).
static void BM_Pairing(benchmark::State& state) {
  sw::SmCalculus calc(sw::SpectralDensity::fractional(0.7));
  const sw::Probe& s = calc.probe(0.3, 0.7, 1.0);
  double hi = 0.5;
  for (auto _ : state) {
    const sw::MaskedDirection window{sw::ConstantDirection{1.0}, 0.0, hi};
    benchmark::DoNotOptimize(calc.pairing(s, window));
    hi = hi < 2.0 ? hi + 1e-4 : 0.5;
  }
}
BENCHMARK(BM_Pairing);

// Full identity suite (quadrature level) per density kind.
static void BM_IdentitySuite(benchmark::State& state) {
  const auto m = state.range(0) == 0 ? sw::SpectralDensity::white()
                                     : sw::SpectralDensity::fractional(0.7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sw::verify_identities(m, {}));
  }
  state.SetLabel(state.range(0) == 0 ? "white" : "fractional");
}
BENCHMARK(BM_IdentitySuite)->Arg(0)->Arg(1);

// Change-of-variable check without the Monte Carlo level.
static void BM_ItoCheck(benchmark::State& state) {
  sw::SmCalculus calc(sw::SpectralDensity::white());
  sw::FRecord square;
  square.F = [](double x) { return x * x; };
  square.dF = [](double x) { return 2.0 * x; };
  square.d2F = [](double) { return 2.0; };
  square.name = "square";
  const sw::MaskedDirection window{sw::ConstantDirection{1.0}, 0.0, 1.0};
  const auto probes = sw::standard_probe_specs();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        sw::ito_check(calc, square, window, probes, sw::ItoOptions{}));
  }
}
BENCHMARK(BM_ItoCheck);

BENCHMARK_MAIN();
