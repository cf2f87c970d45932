#include "doctest.h"

#include <cmath>

#include "spectral_wick/density.hpp"
#include "spectral_wick/errors.hpp"

using spectral_wick::SpectralDensity;

TEST_CASE("built-in densities evaluate to their defining formulas") {
  const auto white = SpectralDensity::white();
  CHECK(white(0.0) == 1.0);
  CHECK(white(123.4) == 1.0);
  CHECK(!white.has_compact_support());
  CHECK(white.power_exponent().value() == 0.0);

  const auto band = SpectralDensity::band_limited(2.5);
  CHECK(band(1.0) == 1.0);
  CHECK(band(-2.4) == 1.0);
  CHECK(band(2.6) == 0.0);
  CHECK(band.band_edge().value() == 2.5);

  const auto frac = SpectralDensity::fractional(0.7);
  const double xi = 0.37;
  CHECK(frac(xi) == doctest::Approx(std::pow(xi, 1.0 - 2.0 * 0.7)).epsilon(1e-15));
  CHECK(frac(-xi) == frac(xi));
  CHECK(frac.power_exponent().value() == doctest::Approx(1.0 - 2.0 * 0.7));

  const auto blf = SpectralDensity::band_limited_fractional(0.6, 3.0);
  CHECK(blf(2.0) == doctest::Approx(std::pow(2.0, 1.0 - 2.0 * 0.6)).epsilon(1e-15));
  CHECK(blf(3.5) == 0.0);
  CHECK(blf.band_edge().value() == 3.0);
}

TEST_CASE("fractional rejects Hurst parameters outside (0,1)") {
  CHECK_THROWS_AS(SpectralDensity::fractional(0.0), spectral_wick::InvalidArgumentError);
  CHECK_THROWS_AS(SpectralDensity::fractional(1.0), spectral_wick::InvalidArgumentError);
  CHECK_THROWS_AS(SpectralDensity::band_limited(-1.0), spectral_wick::InvalidArgumentError);
}

TEST_CASE("custom densities are spot-checked for evenness and sign") {
  // A valid custom density passes.
  const auto ok = SpectralDensity::custom(
      [](double xi) { return 1.0 / (1.0 + xi * xi); }, "cauchy");
  CHECK(ok(2.0) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(!ok.power_exponent().has_value());

  // Odd or negative evaluators are rejected.
  CHECK_THROWS_AS(SpectralDensity::custom([](double xi) { return xi; }, "odd"),
                  spectral_wick::ValidationError);
  CHECK_THROWS_AS(
      SpectralDensity::custom([](double xi) { return -1.0 - xi * xi; }, "neg"),
      spectral_wick::ValidationError);
}

TEST_CASE("admissibility flags the quadratic-weight integrability of built-ins") {
  const auto white_report = spectral_wick::admissibility(SpectralDensity::white(), 1e4, 1e-8);
  // int m/(1+xi^2) over R is pi for m = 1; the finite cutoff loses ~2/cutoff.
  CHECK(white_report.integral_quadratic == doctest::Approx(M_PI).epsilon(1e-3));
  // int 1/(1+|xi|) diverges, so the continuity criterion is not established
  // for the flat density (false means "not proven by this test", not
  // "discontinuous").
  CHECK(!white_report.linear_integral_finite);
  CHECK(!white_report.continuous_version);

  const auto band_report =
      spectral_wick::admissibility(SpectralDensity::band_limited(1.0), 1e4, 1e-8);
  CHECK(band_report.integral_quadratic == doctest::Approx(M_PI / 2.0).epsilon(1e-9));
  CHECK(band_report.linear_integral_finite);
  CHECK(band_report.continuous_version);

  // Decaying power densities pass the criterion.
  const auto frac_report =
      spectral_wick::admissibility(SpectralDensity::fractional(0.75), 1e4, 1e-8);
  CHECK(frac_report.linear_integral_finite);
  CHECK(frac_report.continuous_version);
}
