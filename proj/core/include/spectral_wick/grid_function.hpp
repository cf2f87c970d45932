#pragma once

#include <cstddef>
#include <vector>

namespace spectral_wick {

// Uniform grid u_j = start + j * step, j = 0 .. count-1.  Cell j covers
// [u_j - step/2, u_j + step/2): functions sampled on the grid are understood
// as piecewise-constant over the cells, which is what the discrete Fourier
// machinery integrates.
struct GridSpec {
  double start = -16.0;
  double step = 1.0 / 1024.0;
  std::size_t count = 32768;

  double point(std::size_t j) const { return start + static_cast<double>(j) * step; }
  double end() const { return point(count == 0 ? 0 : count - 1); }
  bool operator==(const GridSpec& other) const {
    return start == other.start && step == other.step && count == other.count;
  }
};

// Real-valued function sampled on a GridSpec.
struct GridFunction {
  GridSpec grid;
  std::vector<double> values;

  GridFunction() = default;
  explicit GridFunction(const GridSpec& g);

  std::size_t size() const { return values.size(); }
};

// Indicator of [a, b): boundary cells get their fractional overlap so that
// cellwise integrals of the grid function reproduce lengths exactly.
GridFunction make_indicator(const GridSpec& grid, double a, double b);

// amp * exp(-(u - center)^2 / (2 width^2)) sampled at the nodes.
GridFunction make_gaussian_bump(const GridSpec& grid, double center,
                                double width, double amp = 1.0);

// Pointwise product with the indicator of [a, b) (same fractional cells).
GridFunction apply_mask(const GridFunction& f, double a, double b);

}  // namespace spectral_wick
