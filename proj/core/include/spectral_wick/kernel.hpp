#pragma once

#include <Eigen/Dense>
#include <span>
#include <unordered_map>
#include <mutex>

#include "spectral_wick/density.hpp"

namespace spectral_wick {

struct KernelConfig {
  // Frequency where custom-density tail handling starts its doubling probes.
  double freq_cutoff = 1e4;
  // Target absolute accuracy for kernel values.
  double abs_tol = 1e-11;
  // Hard cap on explicit oscillation panels per integral.
  std::size_t max_panels = 20000;
  // Floor on the geometric mesh depth near the spectral origin.
  int graded_mesh_levels = 60;
};

// Kernel machinery for the centered Gaussian process with stationary
// increments defined by the spectral density m:
//
//   r(t)    = (2/pi) int_0^inf (1 - cos(t xi)) m(xi) / xi^2 dxi
//   K(t, s) = ( r(t) + r(s) - r(t - s) ) / 2
//
// White density gives r(t) = |t| and K = min on the positive quadrant.
// Values are cached per evaluator; the cache is thread-safe and the results
// are independent of the thread count.
class KernelEvaluator {
 public:
  explicit KernelEvaluator(SpectralDensity density, KernelConfig config = {});

  double variance_r(double t) const;
  double covariance(double t, double s) const;

  // r''(tau) = (2/pi) int_0^inf cos(tau xi) m(xi) dxi, the stationary
  // covariance of the derivative process.  Requires an integrable density;
  // throws DivergenceError otherwise.
  double derivative_cov(double tau) const;

  // Gram matrix K(t_i, t_j).
  Eigen::MatrixXd gram(std::span<const double> points) const;

  const SpectralDensity& density() const { return density_; }
  const KernelConfig& config() const { return config_; }

 private:
  double variance_r_uncached(double t) const;

  SpectralDensity density_;
  KernelConfig config_;
  mutable std::mutex cache_mutex_;
  mutable std::unordered_map<double, double> r_cache_;
};

double variance_r(const SpectralDensity& m, double t, KernelConfig cfg = {});
double covariance(const SpectralDensity& m, double t, double s,
                  KernelConfig cfg = {});
double stationary_derivative_cov(const SpectralDensity& m, double tau,
                                 KernelConfig cfg = {});
Eigen::MatrixXd gram_matrix(const SpectralDensity& m,
                            std::span<const double> points,
                            KernelConfig cfg = {});

struct CholeskyResult {
  Eigen::MatrixXd lower;
  double jitter = 0.0;  // diagonal shift that made the factorization succeed
};

// LLT factorization with an escalating diagonal jitter ladder
// {0, 1e-14, 1e-12, 1e-10, 1e-8} * max diagonal entry.  Throws
// NotPositiveDefiniteError when the last rung still fails.
CholeskyResult cholesky_with_jitter(const Eigen::MatrixXd& matrix);

}  // namespace spectral_wick
