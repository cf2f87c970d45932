#include "spectral_wick/direction.hpp"

#include <cmath>
#include <sstream>

#include "spectral_wick/errors.hpp"

namespace spectral_wick {

double evaluate(const Direction& d, double t) {
  return std::visit(
      [t](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, IndicatorDirection>) {
          return (t >= v.a && t < v.b) ? 1.0 : 0.0;
        } else if constexpr (std::is_same_v<T, ConstantDirection>) {
          return v.value;
        } else if constexpr (std::is_same_v<T, BumpDirection>) {
          const double z = (t - v.center) / v.width;
          return v.amp * std::exp(-0.5 * z * z);
        } else {
          const GridSpec& g = v.f.grid;
          const double pos = (t - g.start) / g.step + 0.5;
          if (pos < 0.0) return 0.0;
          const auto j = static_cast<std::size_t>(pos);
          return j < v.f.values.size() ? v.f.values[j] : 0.0;
        }
      },
      d);
}

GridFunction to_grid(const Direction& d, const GridSpec& grid) {
  return std::visit(
      [&grid](const auto& v) -> GridFunction {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, IndicatorDirection>) {
          return make_indicator(grid, v.a, v.b);
        } else if constexpr (std::is_same_v<T, ConstantDirection>) {
          GridFunction f(grid);
          for (auto& x : f.values) x = v.value;
          return f;
        } else if constexpr (std::is_same_v<T, BumpDirection>) {
          return make_gaussian_bump(grid, v.center, v.width, v.amp);
        } else {
          if (!(v.f.grid == grid)) {
            throw InvalidArgumentError(
                "grid direction was sampled on a different grid");
          }
          return v.f;
        }
      },
      d);
}

std::string describe(const Direction& d) {
  std::ostringstream out;
  std::visit(
      [&out](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, IndicatorDirection>) {
          out << "indicator[" << v.a << ", " << v.b << ")";
        } else if constexpr (std::is_same_v<T, ConstantDirection>) {
          out << "constant(" << v.value << ")";
        } else if constexpr (std::is_same_v<T, BumpDirection>) {
          out << "bump(center=" << v.center << ", width=" << v.width
              << ", amp=" << v.amp << ")";
        } else {
          out << "grid[" << v.f.size() << " cells]";
        }
      },
      d);
  return out.str();
}

}  // namespace spectral_wick
