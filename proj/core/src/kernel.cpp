#include "spectral_wick/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <vector>

#include "spectral_wick/errors.hpp"
#include "spectral_wick/parallel.hpp"
#include "spectral_wick/quadrature.hpp"

namespace spectral_wick {

namespace {

constexpr double kTwoOverPi = 2.0 / std::numbers::pi;
// Explicit half-period panels carried before switching to the accelerated
// oscillatory tail.
constexpr int kBodyHalfPeriods = 256;
constexpr int kTailHalfPeriods = 48;

// int_{from}^{inf} m(xi) / xi^2 dxi for a density of unbounded support.
double dc_tail(const SpectralDensity& m, double from) {
  if (auto p = m.power_exponent()) {
    // Pure power |xi|^p with p < 1: the tail integrates in closed form.
    return std::pow(from, *p - 1.0) / (1.0 - *p);
  }
  // Custom density: octave panels; remaining mass beyond 60 octaves is
  // bounded by sup(m)/xi and far below any tolerance in use.
  const auto& rule = quad::gauss_legendre(16);
  const auto f = [&m](double xi) { return m(xi) / (xi * xi); };
  double acc = 0.0;
  double lo = from;
  for (int octave = 0; octave < 60; ++octave) {
    acc += quad::gl_panel(f, lo, 2.0 * lo, rule);
    lo *= 2.0;
  }
  return acc;
}

}  // namespace

KernelEvaluator::KernelEvaluator(SpectralDensity density, KernelConfig config)
    : density_(std::move(density)), config_(config) {
  if (!(config_.abs_tol > 0.0)) {
    throw InvalidArgumentError("kernel abs_tol must be positive");
  }
  if (config_.max_panels == 0) {
    throw InvalidArgumentError("kernel max_panels must be positive");
  }
}

double KernelEvaluator::variance_r_uncached(double t) const {
  const double omega = std::abs(t);
  if (omega == 0.0) return 0.0;

  const SpectralDensity& m = density_;
  // Stable form of (1 - cos(omega xi)) m(xi) / xi^2.
  const auto g = [&m, omega](double xi) {
    const double s = std::sin(0.5 * omega * xi);
    return 2.0 * s * s * m(xi) / (xi * xi);
  };
  const auto& rule = quad::gauss_legendre(16);
  const double half_period = std::numbers::pi / omega;
  const double power = m.power_exponent().value_or(0.0);

  // Head: (0, b1] holds at most half an oscillation; geometric grading
  // absorbs the integrable spectral singularity at the origin.
  double b1 = half_period;
  if (m.has_compact_support()) b1 = std::min(b1, *m.band_edge());
  double acc = quad::graded_toward_zero(g, b1, config_.graded_mesh_levels,
                                        power, 0.0, rule);

  if (m.has_compact_support()) {
    const double edge = *m.band_edge();
    if (edge > b1) {
      const double panels = (edge - b1) / half_period;
      if (panels > static_cast<double>(config_.max_panels)) {
        throw QuadratureError(
            "kernel integral needs " + std::to_string(panels) +
            " oscillation panels, above the configured max_panels");
      }
      acc += quad::oscillation_aware(g, b1, edge, omega, edge - b1, rule);
    }
    return kTwoOverPi * acc;
  }

  // Body: explicit half-period panels.
  const double b2 = b1 + kBodyHalfPeriods * half_period;
  acc += quad::oscillation_aware(g, b1, b2, omega, half_period, rule);

  // Tail: split 1 - cos into its mean and oscillatory parts.  The mean part
  // integrates in closed form (or by octave panels); the cosine part is an
  // accelerated alternating series over zero-aligned half-periods.
  const auto envelope = [&m](double xi) { return m(xi) / (xi * xi); };
  acc += dc_tail(m, b2);
  acc -= quad::cos_tail(envelope, omega, b2, kTailHalfPeriods);
  return kTwoOverPi * acc;
}

double KernelEvaluator::variance_r(double t) const {
  const double key = std::abs(t);
  {
    std::lock_guard lock(cache_mutex_);
    auto it = r_cache_.find(key);
    if (it != r_cache_.end()) return it->second;
  }
  const double value = variance_r_uncached(key);
  std::lock_guard lock(cache_mutex_);
  r_cache_.emplace(key, value);
  return value;
}

double KernelEvaluator::covariance(double t, double s) const {
  return 0.5 * (variance_r(t) + variance_r(s) - variance_r(t - s));
}

double KernelEvaluator::derivative_cov(double tau) const {
  const SpectralDensity& m = density_;
  const double atau = std::abs(tau);
  const auto& rule = quad::gauss_legendre(16);
  const auto f = [&m, atau](double xi) { return m(xi) * std::cos(atau * xi); };

  if (m.has_compact_support()) {
    const double edge = *m.band_edge();
    const double width =
        atau > 0.0 ? std::numbers::pi / atau : edge;
    if (edge / std::max(width, 1e-300) >
        static_cast<double>(config_.max_panels)) {
      throw QuadratureError(
          "derivative covariance needs too many oscillation panels");
    }
    // The density may carry an integrable singularity at 0 inside the band.
    const double split = std::min(edge, width);
    double acc = quad::graded_toward_zero(f, split, config_.graded_mesh_levels,
                                          m.power_exponent().value_or(0.0),
                                          0.0, rule);
    acc += quad::oscillation_aware(f, split, edge, atau, edge, rule);
    return kTwoOverPi * acc;
  }

  if (m.power_exponent().has_value()) {
    // |xi|^p with p in (-1, 1) is never integrable at infinity.
    throw DivergenceError(
        "spectral density '" + m.name() +
        "' is not integrable; the derivative covariance does not exist");
  }

  // Custom density: integrate over doubling windows and insist the
  // increments die out.
  double cutoff = config_.freq_cutoff;
  const double width0 = atau > 0.0 ? std::numbers::pi / atau : cutoff / 64.0;
  double total =
      quad::graded_toward_zero(f, std::min(1.0, cutoff), 24, 0.0, atau, rule);
  if (cutoff > 1.0) {
    total += quad::oscillation_aware(f, std::min(1.0, cutoff), cutoff, atau,
                                     width0 * 64.0, rule);
  }
  double prev_inc = std::numeric_limits<double>::infinity();
  for (int round = 0; round < 6; ++round) {
    const double inc = quad::oscillation_aware(
        f, cutoff, 2.0 * cutoff, atau,
        std::max(width0, cutoff / 512.0), rule);
    total += inc;
    cutoff *= 2.0;
    const bool small = std::abs(inc) <= config_.abs_tol * std::max(1.0, std::abs(total)) * 1e3;
    const bool shrinking = std::abs(inc) <= 0.5 * std::abs(prev_inc);
    if (round == 5 && !small && !shrinking) {
      throw DivergenceError(
          "custom spectral density shows no integrable tail; the derivative "
          "covariance does not exist");
    }
    prev_inc = inc;
  }
  return kTwoOverPi * total;
}

Eigen::MatrixXd KernelEvaluator::gram(std::span<const double> points) const {
  const std::size_t n = points.size();
  // Collect the distinct r-arguments, evaluate them in parallel (each value
  // depends only on its argument, so the result is thread-count invariant),
  // then assemble.
  std::set<double> needed;
  for (std::size_t i = 0; i < n; ++i) {
    needed.insert(std::abs(points[i]));
    for (std::size_t j = 0; j <= i; ++j) {
      needed.insert(std::abs(points[i] - points[j]));
    }
  }
  const std::vector<double> args(needed.begin(), needed.end());
  parallel_for(args.size(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t k = lo; k < hi; ++k) variance_r(args[k]);
  });

  Eigen::MatrixXd out(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double value = covariance(points[i], points[j]);
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = value;
      out(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = value;
    }
  }
  return out;
}

double variance_r(const SpectralDensity& m, double t, KernelConfig cfg) {
  return KernelEvaluator(m, cfg).variance_r(t);
}

double covariance(const SpectralDensity& m, double t, double s,
                  KernelConfig cfg) {
  return KernelEvaluator(m, cfg).covariance(t, s);
}

double stationary_derivative_cov(const SpectralDensity& m, double tau,
                                 KernelConfig cfg) {
  return KernelEvaluator(m, cfg).derivative_cov(tau);
}

Eigen::MatrixXd gram_matrix(const SpectralDensity& m,
                            std::span<const double> points, KernelConfig cfg) {
  return KernelEvaluator(m, cfg).gram(points);
}

CholeskyResult cholesky_with_jitter(const Eigen::MatrixXd& matrix) {
  if (matrix.rows() != matrix.cols()) {
    throw InvalidArgumentError("cholesky_with_jitter requires a square matrix");
  }
  const double max_diag = matrix.diagonal().cwiseAbs().maxCoeff();
  const double ladder[] = {0.0, 1e-14, 1e-12, 1e-10, 1e-8};
  for (double rung : ladder) {
    Eigen::MatrixXd shifted = matrix;
    const double jitter = rung * std::max(max_diag, 1.0e-300);
    shifted.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(shifted);
    if (llt.info() == Eigen::Success) {
      return {llt.matrixL(), jitter};
    }
  }
  throw NotPositiveDefiniteError(
      "matrix is not positive definite even after diagonal jitter up to "
      "1e-8 * max diagonal");
}

}  // namespace spectral_wick
