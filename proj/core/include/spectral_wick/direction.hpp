#pragma once

#include <string>
#include <variant>

#include "spectral_wick/grid_function.hpp"

namespace spectral_wick {

// Deterministic directions f used in pairings <omega, f>, integrands, and
// Girsanov shifts.  Analytic kinds keep exact pointwise evaluation available
// to the quadrature-based code paths; Grid carries arbitrary sampled data.

struct IndicatorDirection {
  double a = 0.0;
  double b = 1.0;
};

struct ConstantDirection {
  double value = 1.0;
};

struct BumpDirection {
  double center = 0.0;
  double width = 1.0;
  double amp = 1.0;
};

struct GridDirection {
  GridFunction f;
};

using Direction = std::variant<IndicatorDirection, ConstantDirection,
                               BumpDirection, GridDirection>;

// Pointwise value f(t).  Grid directions use cell lookup (piecewise constant,
// zero outside the grid).
double evaluate(const Direction& d, double t);

// Sample onto a grid (indicator boundary cells carry fractional overlap).
GridFunction to_grid(const Direction& d, const GridSpec& grid);

std::string describe(const Direction& d);

}  // namespace spectral_wick
