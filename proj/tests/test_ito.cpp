#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "spectral_wick/density.hpp"
#include "spectral_wick/errors.hpp"
#include "spectral_wick/ito.hpp"

using namespace spectral_wick;

TEST_CASE("the running variance of a plain window is the kernel variance") {
  SmCalculus calc(SpectralDensity::white());
  const MaskedDirection f{ConstantDirection{1.0}, 0.0, 2.0};
  VarianceCurve v(calc, f, 2.0);
  for (double t : {0.25, 1.0, 1.75}) {
    CHECK(v.value(t) == doctest::Approx(t).epsilon(1e-9));
    CHECK(v.derivative(t) == doctest::Approx(1.0).epsilon(1e-7));
  }
}

TEST_CASE("indicator weights freeze the variance outside their support") {
  SmCalculus calc(SpectralDensity::white());
  const MaskedDirection f{IndicatorDirection{0.5, 1.0}, 0.0, 2.0};
  VarianceCurve v(calc, f, 2.0);
  // v(t) = |[0.5, 1.0] cap [0, t]|
  CHECK(v.value(0.25) == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(v.value(0.75) == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(v.value(1.8) == doctest::Approx(0.5).epsilon(1e-9));
  // the kink locations are published so integrators can split there
  const auto& kinks = v.breakpoints();
  CHECK(std::count(kinks.begin(), kinks.end(), 0.5) == 1);
  CHECK(std::count(kinks.begin(), kinks.end(), 1.0) == 1);
  // derivatives on each smooth piece
  CHECK(v.derivative(0.75) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(v.derivative(1.5) == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("smooth bump weights integrate their square") {
  SmCalculus calc(SpectralDensity::white());
  const BumpDirection g{0.8, 0.3, 1.5};
  const MaskedDirection f{g, 0.0, 2.0};
  VarianceCurve v(calc, f, 2.0);
  // v(t) = int_0^t g^2 = amp^2 w' sqrt(pi)/... use erf form with width/sqrt2.
  const auto closed = [&](double t) {
    const double w = 0.3 / std::sqrt(2.0);  // g^2 has width 0.3/sqrt(2)
    return 1.5 * 1.5 * w * std::sqrt(M_PI / 2.0) *
           (std::erf((t - 0.8) / (std::sqrt(2.0) * w)) -
            std::erf((0.0 - 0.8) / (std::sqrt(2.0) * w)));
  };
  for (double t : {0.5, 1.0, 1.6}) {
    CHECK(v.value(t) == doctest::Approx(closed(t)).epsilon(5e-5));
    CHECK(v.derivative(t) ==
          doctest::Approx(1.5 * 1.5 *
                          std::exp(-(t - 0.8) * (t - 0.8) / 0.09))
              .epsilon(5e-4).scale(1.0));
  }
}

TEST_CASE("closed and numeric transform values of Wick-chain integrals agree") {
  SmCalculus calc(SpectralDensity::white());
  const Probe& s = calc.probe(0.3, 0.7, 1.0);
  for (int degree : {0, 1, 2, 3}) {
    IntegrandSpec spec;
    spec.kind = WickChainIntegrand{degree};
    spec.f = MaskedDirection{ConstantDirection{1.0}, 0.0, 1.0};
    const auto check = verify_integral(calc, spec, s);
    CHECK(check.abs_error < 1e-7);
  }
}

TEST_CASE("path powers above two have no closed transform value") {
  SmCalculus calc(SpectralDensity::white());
  const Probe& s = calc.probe(0.0, 1.0, 1.0);
  IntegrandSpec spec;
  spec.kind = PathPowerIntegrand{3};
  spec.f = MaskedDirection{ConstantDirection{1.0}, 0.0, 1.0};
  CHECK_THROWS_AS(integrate_closed(calc, spec, s), InvalidArgumentError);
}

TEST_CASE("second moments of integrands use closed Gaussian moments") {
  SmCalculus calc(SpectralDensity::white());
  IntegrandSpec spec;
  spec.kind = PathPowerIntegrand{2};
  spec.f = MaskedDirection{ConstantDirection{1.0}, 0.0, 1.0};
  // E[ X_t^4 ] = 3 v^2 with v = t under the flat density.
  const double t = 0.8;
  CHECK(integrand_second_moment(calc, spec, t) ==
        doctest::Approx(3.0 * t * t).epsilon(1e-8));
}

TEST_CASE("the change-of-variable identity closes for a quadratic") {
  SmCalculus calc(SpectralDensity::white());
  FRecord square;
  square.F = [](double x) { return x * x; };
  square.dF = [](double x) { return 2.0 * x; };
  square.d2F = [](double) { return 2.0; };
  square.name = "square";
  const MaskedDirection window{ConstantDirection{1.0}, 0.0, 1.0};
  const std::vector<ProbeSpec> probes = {{0.0, 1.0, 1.0}, {0.5, 0.7, 0.8}};
  ItoOptions opts;  // no Monte Carlo level
  const auto report = ito_check(calc, square, window, probes, opts);
  REQUIRE(report.probe_results.size() == probes.size() + 1);
  CHECK(report.max_abs_error < 1e-6);
  CHECK(!report.mc_ran);
  // On the zero probe the identity is E[X_1^2] - 0 = 0 + 1/2 int v' = v(1).
  const auto& zero = report.probe_results.front();
  CHECK(zero.lhs == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(zero.db_term == doctest::Approx(0.0).epsilon(1e-8));
  CHECK(zero.dt_term == doctest::Approx(1.0).epsilon(1e-6));
}
