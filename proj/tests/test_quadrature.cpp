#include "doctest.h"

#include <cmath>
#include <span>
#include <vector>

#include "spectral_wick/errors.hpp"
#include "spectral_wick/quadrature.hpp"

namespace quad = spectral_wick::quad;

TEST_CASE("Gauss-Legendre integrates polynomials of degree 2n-1 exactly") {
  const auto& rule = quad::gauss_legendre(8);
  // degree 15 polynomial on [-1, 2]: x^15 has antiderivative x^16/16.
  const auto f = [](double x) { return std::pow(x, 15); };
  const double exact = (std::pow(2.0, 16) - 1.0) / 16.0;
  CHECK(quad::gl_panel(f, -1.0, 2.0, rule) == doctest::Approx(exact).epsilon(1e-13));

  // degree 16 must NOT be exact for order 8 (sanity that the rule is the
  // advertised order and not something higher).
  const auto g = [](double x) { return std::pow(x, 16); };
  const double exact16 = (std::pow(2.0, 17) + 1.0) / 17.0;
  CHECK(std::abs(quad::gl_panel(g, -1.0, 2.0, rule) - exact16) > 1e-9);
}

TEST_CASE("Gauss-Hermite reproduces standard normal moments") {
  const auto& rule = quad::gauss_hermite(32);
  const double inv_sqrt_pi = 1.0 / std::sqrt(M_PI);
  double m0 = 0.0, m2 = 0.0, m4 = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double z = std::sqrt(2.0) * rule.nodes[i];
    m0 += rule.weights[i];
    m2 += rule.weights[i] * z * z;
    m4 += rule.weights[i] * z * z * z * z;
  }
  CHECK(inv_sqrt_pi * m0 == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(inv_sqrt_pi * m2 == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(inv_sqrt_pi * m4 == doctest::Approx(3.0).epsilon(1e-13));
}

TEST_CASE("composite sums Gauss panels over caller-supplied edges") {
  const std::vector<double> edges = {0.0, 0.3, 1.1, 2.0};
  const auto f = [](double x) { return std::exp(-x); };
  const double exact = 1.0 - std::exp(-2.0);
  CHECK(quad::composite(f, edges, quad::gauss_legendre(16)) ==
        doctest::Approx(exact).epsilon(1e-14));
}

TEST_CASE("adaptive Simpson meets tolerance on smooth integrands") {
  const auto f = [](double x) { return std::sin(x) * std::exp(-x); };
  // antiderivative: -e^{-x}(sin x + cos x)/2
  const auto F = [](double x) { return -std::exp(-x) * (std::sin(x) + std::cos(x)) / 2.0; };
  const double exact = F(3.0) - F(0.0);
  CHECK(std::abs(quad::adaptive(f, 0.0, 3.0, 1e-10) - exact) < 1e-9);
}

TEST_CASE("adaptive Simpson reports failure on an interior jump") {
  // A discontinuity never satisfies the Richardson criterion at fixed
  // proportional tolerance, so the budget must run out rather than return a
  // silently wrong value.
  const auto f = [](double x) { return x < 0.3333333 ? 0.0 : 1.0; };
  CHECK_THROWS_AS(quad::adaptive(f, 0.0, 1.0, 1e-12, 18), spectral_wick::QuadratureError);
}

TEST_CASE("adaptive_segments handles kinks placed on split points") {
  const auto f = [](double x) { return std::abs(x - 0.5); };
  const std::vector<double> pts = {0.0, 0.5, 1.0};
  CHECK(quad::adaptive_segments(f, pts, 1e-12) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("graded mesh integrates an inverse-square-root singularity") {
  const auto f = [](double x) { return 1.0 / std::sqrt(x); };
  const double got = quad::graded_toward_zero(f, 1.0, 60, -0.5, 0.0,
                                              quad::gauss_legendre(16));
  CHECK(got == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("oscillation_aware resolves a rapidly oscillating factor") {
  const double omega = 40.0;
  const auto f = [&](double x) { return std::cos(omega * x) * std::exp(-x); };
  // int_0^2 cos(w x) e^{-x} dx = [e^{-x}(w sin(wx) - cos(wx))/(1+w^2)]_0^2
  const auto F = [&](double x) {
    return std::exp(-x) * (omega * std::sin(omega * x) - std::cos(omega * x)) /
           (1.0 + omega * omega);
  };
  const double exact = F(2.0) - F(0.0);
  const double got = quad::oscillation_aware(f, 0.0, 2.0, omega, 0.5,
                                             quad::gauss_legendre(16));
  CHECK(got == doctest::Approx(exact).epsilon(1e-12));
}

TEST_CASE("alternating series acceleration reaches ln 2") {
  // 24 raw terms truncate at ~2e-2; the accelerated limit must do far
  // better, and 40 terms should be at machine precision.
  std::vector<double> terms;
  for (int k = 0; k < 40; ++k) {
    terms.push_back((k % 2 == 0 ? 1.0 : -1.0) / static_cast<double>(k + 1));
  }
  const double full = quad::alternating_series_limit(terms);
  CHECK(full == doctest::Approx(std::log(2.0)).epsilon(1e-13));
  const double short_run = quad::alternating_series_limit(
      std::span<const double>(terms.data(), 24));
  CHECK(std::abs(short_run - std::log(2.0)) < 1e-8);
}

TEST_CASE("cos_tail matches the analytic tail of cos(xi)/xi^2") {
  // Integration by parts: int_1^inf cos(xi)/xi^2 dxi
  //   = cos(1) - int_1^inf sin(xi)/xi dxi = cos(1) - pi/2 + Si(1)
  //   = -0.084410950559573887.
  const auto envelope = [](double xi) { return 1.0 / (xi * xi); };
  CHECK(quad::cos_tail(envelope, 1.0, 1.0) ==
        doctest::Approx(-0.084410950559573887).epsilon(1e-10));
}
