#include "spectral_wick/density.hpp"

#include <cmath>
#include <limits>
#include <utility>

#include "spectral_wick/errors.hpp"
#include "spectral_wick/quadrature.hpp"

namespace spectral_wick {

namespace {

void require(bool condition, const std::string& message) {
  if (!condition) throw InvalidArgumentError(message);
}

// Golden-ratio low-discrepancy sequence on [0, 1].
double kronecker_point(std::size_t i) {
  constexpr double kGolden = 0.6180339887498949;
  double v = (static_cast<double>(i) + 1.0) * kGolden;
  return v - std::floor(v);
}

void spot_check_custom(const std::function<double(double)>& f, double span) {
  constexpr std::size_t kPoints = 1000;
  for (std::size_t i = 0; i < kPoints; ++i) {
    const double xi = span * kronecker_point(i);
    const double plus = f(xi);
    const double minus = f(-xi);
    if (!std::isfinite(plus) || !std::isfinite(minus)) {
      throw ValidationError("custom density is not finite at xi = " +
                            std::to_string(xi));
    }
    if (plus < 0.0 || minus < 0.0) {
      throw ValidationError("custom density is negative at xi = " +
                            std::to_string(xi));
    }
    const double scale = std::max(1.0, std::abs(plus));
    if (std::abs(plus - minus) > 1e-12 * scale) {
      throw ValidationError("custom density is not even at xi = " +
                            std::to_string(xi));
    }
  }
}

}  // namespace

SpectralDensity SpectralDensity::white() {
  SpectralDensity m;
  m.kind_ = DensityKind::kWhite;
  m.name_ = "white";
  m.hurst_ = 0.5;
  m.power_ = 0.0;
  return m;
}

SpectralDensity SpectralDensity::band_limited(double delta) {
  require(delta > 0.0 && std::isfinite(delta),
          "band_limited: delta must be positive and finite");
  SpectralDensity m;
  m.kind_ = DensityKind::kBandLimited;
  m.name_ = "band_limited";
  m.hurst_ = 0.5;
  m.power_ = 0.0;
  m.band_edge_ = delta;
  return m;
}

SpectralDensity SpectralDensity::fractional(double hurst) {
  require(hurst > 0.0 && hurst < 1.0, "fractional: hurst must lie in (0, 1)");
  SpectralDensity m;
  m.kind_ = DensityKind::kFractional;
  m.name_ = "fractional";
  m.hurst_ = hurst;
  m.power_ = 1.0 - 2.0 * hurst;
  return m;
}

SpectralDensity SpectralDensity::band_limited_fractional(double hurst,
                                                         double delta) {
  require(hurst > 0.0 && hurst < 1.0,
          "band_limited_fractional: hurst must lie in (0, 1)");
  require(delta > 0.0 && std::isfinite(delta),
          "band_limited_fractional: delta must be positive and finite");
  SpectralDensity m;
  m.kind_ = DensityKind::kBandLimitedFractional;
  m.name_ = "band_limited_fractional";
  m.hurst_ = hurst;
  m.power_ = 1.0 - 2.0 * hurst;
  m.band_edge_ = delta;
  return m;
}

SpectralDensity SpectralDensity::custom(std::function<double(double)> evaluator,
                                        std::string name,
                                        double spot_check_span) {
  require(static_cast<bool>(evaluator), "custom: evaluator must be callable");
  require(spot_check_span > 0.0, "custom: spot_check_span must be positive");
  spot_check_custom(evaluator, spot_check_span);
  SpectralDensity m;
  m.kind_ = DensityKind::kCustom;
  m.name_ = std::move(name);
  m.evaluator_ = std::move(evaluator);
  return m;
}

double SpectralDensity::operator()(double xi) const {
  const double a = std::abs(xi);
  switch (kind_) {
    case DensityKind::kWhite:
      return 1.0;
    case DensityKind::kBandLimited:
      return a <= *band_edge_ ? 1.0 : 0.0;
    case DensityKind::kFractional:
      if (a == 0.0) {
        // The power is integrable at 0; quadrature never lands exactly on 0,
        // but grid code may.  Return the limit for H = 1/2 and +inf guard
        // otherwise (p < 0) / 0 (p > 0).
        if (*power_ == 0.0) return 1.0;
        return *power_ > 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
      }
      return std::pow(a, *power_);
    case DensityKind::kBandLimitedFractional:
      if (a > *band_edge_) return 0.0;
      if (a == 0.0) {
        if (*power_ == 0.0) return 1.0;
        return *power_ > 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
      }
      return std::pow(a, *power_);
    case DensityKind::kCustom:
      return evaluator_(a);
  }
  return 0.0;
}

AdmissibilityReport admissibility(const SpectralDensity& m, double cutoff,
                                  double tol) {
  if (!(cutoff > 0.0) || !std::isfinite(cutoff)) {
    throw InvalidArgumentError("admissibility: cutoff must be positive");
  }
  if (!(tol > 0.0)) {
    throw InvalidArgumentError("admissibility: tol must be positive");
  }

  const double upper =
      m.has_compact_support() ? std::min(cutoff, *m.band_edge()) : cutoff;

  const auto quadratic = [&m](double xi) { return m(xi) / (1.0 + xi * xi); };
  const auto linear = [&m](double xi) { return m(xi) / (1.0 + xi); };

  // Integrands may blow up (integrably) at 0 for fractional kinds: use the
  // graded mesh near zero and adaptive panels over the body.
  const double split = std::min(1.0, upper);
  const auto& rule = quad::gauss_legendre(16);
  double iq = quad::graded_toward_zero(quadratic, split, 24,
                                       m.power_exponent().value_or(0.0), 0.0,
                                       rule);
  double il = quad::graded_toward_zero(linear, split, 24,
                                       m.power_exponent().value_or(0.0), 0.0,
                                       rule);
  if (upper > split) {
    iq += quad::adaptive(quadratic, split, upper, tol / 4.0);
    il += quad::adaptive(linear, split, upper, tol / 4.0);
  }

  AdmissibilityReport report;
  report.integral_quadratic = 2.0 * iq;  // even integrand, doubled half-line
  report.integral_linear = 2.0 * il;

  if (m.has_compact_support()) {
    report.linear_integral_finite = true;
  } else if (m.power_exponent().has_value()) {
    // Pure power |xi|^p: m/(1+|xi|) ~ |xi|^{p-1} at infinity, integrable
    // iff p < 0; p = 0 (white) gives a logarithmic divergence.
    report.linear_integral_finite = *m.power_exponent() < 0.0;
  } else {
    // Custom density: double the cutoff a few times and watch the increments.
    double level = il;
    double lo = upper;
    bool finite = true;
    double first_increment = -1.0;
    for (int round = 0; round < 6; ++round) {
      const double hi = lo * 2.0;
      const double inc = quad::adaptive(linear, lo, hi, tol / 8.0);
      if (round == 0) first_increment = std::max(inc, 1e-300);
      // Converging tails shrink geometrically under doubling; a flat or
      // growing increment signals (at least) logarithmic divergence.
      if (round == 5 && inc > 0.25 * first_increment &&
          inc > tol * std::max(1.0, level)) {
        finite = false;
      }
      level += inc;
      lo = hi;
    }
    report.linear_integral_finite = finite;
  }
  report.continuous_version = report.linear_integral_finite;
  return report;
}

}  // namespace spectral_wick
