#include "doctest.h"

#include <cmath>
#include <cstddef>

#include "spectral_wick/grid_function.hpp"

using spectral_wick::GridFunction;
using spectral_wick::GridSpec;

namespace {
double cell_integral(const GridFunction& f) {
  double sum = 0.0;
  for (double v : f.values) sum += v;
  return sum * f.grid.step;
}
}  // namespace

TEST_CASE("GridSpec points are uniform and end() is the last node") {
  GridSpec g;
  g.start = -2.0;
  g.step = 0.25;
  g.count = 17;
  CHECK(g.point(0) == -2.0);
  CHECK(g.point(8) == 0.0);
  CHECK(g.end() == 2.0);
}

TEST_CASE("indicator grid functions integrate to the window length exactly") {
  GridSpec g;
  g.start = -4.0;
  g.step = 1.0 / 128.0;
  g.count = 1024;

  // Edges off the cell boundaries: the fractional boundary cells must make
  // the cellwise integral exact anyway.
  const auto ind = spectral_wick::make_indicator(g, 0.3, 1.7);
  CHECK(cell_integral(ind) == doctest::Approx(1.4).epsilon(1e-13));

  // Interior nodes carry height one.
  const std::size_t mid = static_cast<std::size_t>((1.0 - g.start) / g.step);
  CHECK(ind.values[mid] == 1.0);
}

TEST_CASE("gaussian bumps sample the closed form") {
  GridSpec g;
  g.start = -8.0;
  g.step = 1.0 / 64.0;
  g.count = 1024;
  const auto bump = spectral_wick::make_gaussian_bump(g, 0.5, 0.2, 1.5);
  for (std::size_t j = 100; j < 1000; j += 97) {
    const double u = g.point(j);
    const double expect = 1.5 * std::exp(-(u - 0.5) * (u - 0.5) / (2.0 * 0.04));
    CHECK(bump.values[j] == doctest::Approx(expect).epsilon(1e-15));
  }
  // Total mass approaches amp * width * sqrt(2 pi).
  CHECK(cell_integral(bump) ==
        doctest::Approx(1.5 * 0.2 * std::sqrt(2.0 * M_PI)).epsilon(1e-10));
}

TEST_CASE("masking is the pointwise product with the indicator") {
  GridSpec g;
  g.start = 0.0;
  g.step = 0.125;
  g.count = 64;
  GridFunction f(g);
  for (std::size_t j = 0; j < f.size(); ++j) f.values[j] = 2.0;
  const auto masked = spectral_wick::apply_mask(f, 1.0, 3.0);
  CHECK(cell_integral(masked) == doctest::Approx(4.0).epsilon(1e-13));
}
