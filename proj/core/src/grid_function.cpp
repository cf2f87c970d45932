#include "spectral_wick/grid_function.hpp"

#include <algorithm>
#include <cmath>

#include "spectral_wick/errors.hpp"

namespace spectral_wick {

namespace {

void validate(const GridSpec& grid) {
  if (!(grid.step > 0.0) || !std::isfinite(grid.step)) {
    throw InvalidArgumentError("grid step must be positive and finite");
  }
  if (grid.count == 0) {
    throw InvalidArgumentError("grid count must be positive");
  }
}

// Fraction of cell [u_j - h/2, u_j + h/2) covered by [a, b).
double overlap_fraction(double u, double h, double a, double b) {
  const double lo = std::max(u - h / 2.0, a);
  const double hi = std::min(u + h / 2.0, b);
  return hi > lo ? (hi - lo) / h : 0.0;
}

}  // namespace

GridFunction::GridFunction(const GridSpec& g) : grid(g) {
  validate(g);
  values.assign(g.count, 0.0);
}

GridFunction make_indicator(const GridSpec& grid, double a, double b) {
  validate(grid);
  if (!(a < b)) throw InvalidArgumentError("indicator requires a < b");
  GridFunction f(grid);
  for (std::size_t j = 0; j < grid.count; ++j) {
    f.values[j] = overlap_fraction(grid.point(j), grid.step, a, b);
  }
  return f;
}

GridFunction make_gaussian_bump(const GridSpec& grid, double center,
                                double width, double amp) {
  validate(grid);
  if (!(width > 0.0)) throw InvalidArgumentError("bump width must be positive");
  GridFunction f(grid);
  for (std::size_t j = 0; j < grid.count; ++j) {
    const double z = (grid.point(j) - center) / width;
    f.values[j] = amp * std::exp(-0.5 * z * z);
  }
  return f;
}

GridFunction apply_mask(const GridFunction& f, double a, double b) {
  if (!(a < b)) throw InvalidArgumentError("mask requires a < b");
  GridFunction out = f;
  for (std::size_t j = 0; j < out.grid.count; ++j) {
    out.values[j] *=
        overlap_fraction(out.grid.point(j), out.grid.step, a, b);
  }
  return out;
}

}  // namespace spectral_wick
