#include "doctest.h"

#include <cmath>

#include "spectral_wick/chebyshev.hpp"

using spectral_wick::ChebyshevSeries;

TEST_CASE("Chebyshev fit reproduces exp on an asymmetric interval") {
  const auto series = ChebyshevSeries::fit([](double x) { return std::exp(x); },
                                           64, -1.5, 2.5);
  for (double x = -1.5; x <= 2.5; x += 0.173) {
    CHECK(series(x) == doctest::Approx(std::exp(x)).epsilon(1e-13));
  }
  CHECK(series.lower() == -1.5);
  CHECK(series.upper() == 2.5);
}

TEST_CASE("antiderivative vanishes at its anchor and differentiates back") {
  const auto series = ChebyshevSeries::fit([](double x) { return std::exp(x); },
                                           64, -1.5, 2.5);
  const auto anti = series.antiderivative(0.0);
  CHECK(anti(0.0) == doctest::Approx(0.0).epsilon(1e-14));
  for (double x = -1.4; x <= 2.4; x += 0.311) {
    CHECK(anti(x) == doctest::Approx(std::exp(x) - 1.0).epsilon(1e-12));
  }
  const auto back = anti.derivative();
  for (double x = -1.4; x <= 2.4; x += 0.311) {
    CHECK(back(x) == doctest::Approx(std::exp(x)).epsilon(1e-11));
  }
}

TEST_CASE("derivative of cos is -sin") {
  const auto series = ChebyshevSeries::fit([](double x) { return std::cos(x); },
                                           64, 0.0, 6.0);
  const auto der = series.derivative();
  for (double x = 0.1; x <= 5.9; x += 0.47) {
    CHECK(der(x) == doctest::Approx(-std::sin(x)).epsilon(1e-10));
  }
}

TEST_CASE("tail magnitude exposes convergence of the coefficient sequence") {
  const auto good = ChebyshevSeries::fit([](double x) { return std::exp(x); },
                                         64, -1.0, 1.0);
  CHECK(good.tail_magnitude(8) < 1e-14 * good.max_coefficient());

  // |x| converges only algebraically: the tail stays visibly fat.
  const auto bad = ChebyshevSeries::fit([](double x) { return std::abs(x); },
                                        64, -1.0, 1.0);
  CHECK(bad.tail_magnitude(8) > 1e-6 * bad.max_coefficient());
}
