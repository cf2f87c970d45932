#include "doctest.h"

#include <cmath>
#include <vector>

#include "spectral_wick/density.hpp"
#include "spectral_wick/kernel.hpp"
#include "spectral_wick/s_transform.hpp"
#include "spectral_wick/sampling.hpp"

using namespace spectral_wick;

namespace {
const std::vector<double>& grid8() {
  static const std::vector<double> t = {0.25, 0.5, 0.75, 1.0,
                                        1.25, 1.5, 1.75, 2.0};
  return t;
}
}  // namespace

TEST_CASE("identical seeds reproduce paths bit for bit") {
  KernelEvaluator kernel(SpectralDensity::white());
  for (auto method : {SampleMethod::kCholesky, SampleMethod::kSpectral}) {
    const auto a = sample_paths(kernel, grid8(), 64, 11, method);
    const auto b = sample_paths(kernel, grid8(), 64, 11, method);
    REQUIRE(a.paths.rows() == 64);
    REQUIRE(a.paths.cols() == 8);
    CHECK((a.paths - b.paths).cwiseAbs().maxCoeff() == 0.0);

    const auto c = sample_paths(kernel, grid8(), 64, 12, method);
    CHECK((a.paths - c.paths).cwiseAbs().maxCoeff() > 0.0);
  }
}

TEST_CASE("empirical covariances track the kernel for both methods") {
  KernelEvaluator kernel(SpectralDensity::fractional(0.7));
  for (auto method : {SampleMethod::kCholesky, SampleMethod::kSpectral}) {
    const auto ensemble = sample_paths(kernel, grid8(), 8000, 5, method);
    const auto check = covariance_check(ensemble, kernel);
    // Every entry within 5 jackknife standard errors at this pinned seed.
    CHECK(check.max_z < 5.0);
    CHECK(check.target(7, 7) ==
          doctest::Approx(kernel.variance_r(2.0)).epsilon(1e-12));
  }
}

TEST_CASE("both sampling routes draw from the same law") {
  KernelEvaluator kernel(SpectralDensity::band_limited_fractional(0.6, 8.0));
  const auto chol = sample_paths(kernel, grid8(), 6000, 7, SampleMethod::kCholesky);
  const auto spec = sample_paths(kernel, grid8(), 6000, 7, SampleMethod::kSpectral);
  const auto cc = covariance_check(chol, kernel);
  const auto sc = covariance_check(spec, kernel);
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 8; ++j) {
      const double se = std::hypot(cc.std_error(i, j), sc.std_error(i, j));
      CHECK(std::abs(cc.empirical(i, j) - sc.empirical(i, j)) < 5.0 * se);
    }
  }
}

TEST_CASE("the measure change shifts means by the predicted pairing") {
  SmCalculus calc(SpectralDensity::white());
  const MaskedDirection f{IndicatorDirection{0.0, 1.0}, 0.0, 1.0};
  const auto report = girsanov_check(calc, f, grid8(), 4000, 13);
  REQUIRE(report.times.size() == 8);
  // expected shift is min(t, 1) under the flat density
  for (std::size_t j = 0; j < 8; ++j) {
    CHECK(report.expected_shift[j] ==
          doctest::Approx(std::min(grid8()[j], 1.0)).epsilon(1e-8));
  }
  CHECK(report.norm_sq_f == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(report.max_z < 5.0);
  CHECK(report.weight_z < 5.0);
  CHECK(report.ess > 400.0);
  CHECK(report.cov_within_3se >= 0.9);
}
