#include "doctest.h"

#include <cmath>
#include <cstddef>

#include "spectral_wick/density.hpp"
#include "spectral_wick/errors.hpp"
#include "spectral_wick/grid_function.hpp"
#include "spectral_wick/tm_operator.hpp"

using namespace spectral_wick;

namespace {
GridSpec default_grid() { return GridSpec{}; }
}  // namespace

TEST_CASE("the flat multiplier acts as the identity") {
  const auto f = make_gaussian_bump(default_grid(), 0.5, 0.4, 1.0);
  const auto g = apply_tm(f, SpectralDensity::white());
  REQUIRE(g.size() == f.size());
  double max_err = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) {
    max_err = std::max(max_err, std::abs(g.values[j] - f.values[j]));
  }
  CHECK(max_err < 1e-10);
}

TEST_CASE("flat-multiplier norms obey Parseval") {
  // ||T_1 f||^2 = int f^2; for a gaussian bump amp*e^{-(u-c)^2/(2w^2)} the
  // square integrates to amp^2 * w * sqrt(pi).
  const double w = 0.5, amp = 1.3;
  const auto f = make_gaussian_bump(default_grid(), 0.25, w, amp);
  CHECK(norm_tm_sq(f, SpectralDensity::white()) ==
        doctest::Approx(amp * amp * w * std::sqrt(M_PI)).epsilon(1e-9));

  // Cross inner products: two overlapping bumps with the gaussian-product
  // closed form.
  const double c1 = 0.0, w1 = 0.5, c2 = 0.6, w2 = 0.7;
  const auto g1 = make_gaussian_bump(default_grid(), c1, w1, 1.0);
  const auto g2 = make_gaussian_bump(default_grid(), c2, w2, 1.0);
  const double ss = w1 * w1 + w2 * w2;
  const double expect =
      std::sqrt(2.0 * M_PI) * w1 * w2 / std::sqrt(ss) *
      std::exp(-(c1 - c2) * (c1 - c2) / (2.0 * ss));
  CHECK(inner_product_tm(g1, g2, SpectralDensity::white()) ==
        doctest::Approx(expect).epsilon(1e-9));
}

TEST_CASE("weighted norm of a window reproduces the variance normalization") {
  // ||T_m 1_{[0,1]}||^2 equals the variance of the process at t = 1, which
  // for the power density with Hurst parameter H is 1/(Gamma(2H+1) sin(pi H)).
  const auto ind = make_indicator(default_grid(), 0.0, 1.0);
  const double got = norm_tm_sq(ind, SpectralDensity::fractional(0.7));
  CHECK(got == doctest::Approx(0.99508813590392496).epsilon(2e-3));
}

TEST_CASE("a compactly supported multiplier needs resolved bins") {
  const auto f = make_gaussian_bump(default_grid(), 0.0, 0.5, 1.0);
  CHECK_THROWS_AS(apply_tm(f, SpectralDensity::band_limited(1e-5)),
                  GridResolutionError);
}

TEST_CASE("inner products require matching grids") {
  GridSpec other;
  other.count = 16384;
  const auto f = make_gaussian_bump(default_grid(), 0.0, 0.5, 1.0);
  const auto g = make_gaussian_bump(other, 0.0, 0.5, 1.0);
  CHECK_THROWS_AS(inner_product_tm(f, g, SpectralDensity::white()),
                  InvalidArgumentError);
}

TEST_CASE("domain diagnostics separate smooth inputs from near-deltas") {
  const auto smooth = make_gaussian_bump(default_grid(), 0.0, 0.5, 1.0);
  const auto report = domain_check(smooth, SpectralDensity::white());
  CHECK(report.in_domain);
  CHECK(report.tail_fraction < 1e-3);

  // A single-cell spike has an essentially flat spectrum: half its weighted
  // energy sits in the top half of any resolved band.
  GridFunction spike(default_grid());
  spike.values[spike.size() / 2] = 1.0;
  const auto bad = domain_check(spike, SpectralDensity::white());
  CHECK(!bad.in_domain);
  CHECK_THROWS_AS(require_in_domain(spike, SpectralDensity::white()),
                  DomainViolationError);
}
