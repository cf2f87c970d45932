#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "spectral_wick/kernel.hpp"
#include "spectral_wick/s_transform.hpp"

namespace spectral_wick {

enum class SampleMethod {
  kCholesky,  // exact multivariate normal via Gram factorization
  kSpectral,  // sum over frequency bins of the spectral representation
};

struct PathEnsemble {
  std::vector<double> times;
  Eigen::MatrixXd paths;  // n_paths x n_times, row = one path
  std::uint64_t seed = 0;
  SampleMethod method = SampleMethod::kCholesky;

  std::size_t n_paths() const { return static_cast<std::size_t>(paths.rows()); }
};

// Draws centered Gaussian paths B(t_j) with covariance K.  Path i consumes
// stream i of the counter-based generator, so results are byte-identical for
// any thread count.  The spectral method represents
//   B(t) = sum_k sqrt(m(xi_k) dxi / pi) [ Z1_k sin(xi_k t) + Z2_k (1 - cos(xi_k t)) ] / xi_k
// over midpoint bins xi_k = (k - 1/2) dxi and doubles its frequency ceiling
// until the variance at the largest time matches r to 0.5%.
PathEnsemble sample_paths(const KernelEvaluator& kernel,
                          std::span<const double> times, std::size_t n_paths,
                          std::uint64_t seed,
                          SampleMethod method = SampleMethod::kCholesky);

struct CovarianceCheck {
  Eigen::MatrixXd target;      // K(t_i, t_j)
  Eigen::MatrixXd empirical;   // centered unbiased estimate
  Eigen::MatrixXd std_error;   // exact leave-one-out jackknife per entry
  double max_abs_error = 0.0;
  double max_z = 0.0;          // max |empirical - target| / std_error
};

// Compares the ensemble's empirical covariance to the kernel target.
CovarianceCheck covariance_check(const PathEnsemble& ensemble,
                                 const KernelEvaluator& kernel);

struct GirsanovReport {
  std::vector<double> times;
  std::vector<double> expected_shift;  // (T_m f, T_m 1_[0,t))
  std::vector<double> weighted_mean;   // self-normalized importance estimate
  std::vector<double> std_error;       // jackknife of the ratio estimator
  double norm_sq_f = 0.0;              // ||T_m f||^2 (weight normalizer)
  double ess = 0.0;                    // (sum w)^2 / sum w^2
  bool low_ess = false;                // ess < n/10
  double max_z = 0.0;                  // shifted means vs 0, in stderr units
  std::size_t n_paths = 0;

  // Weighted second moment of the shifted paths vs the analytic kernel.
  Eigen::MatrixXd cov_target;     // K(t_a, t_b)
  Eigen::MatrixXd cov_weighted;   // self-normalized weighted estimate
  Eigen::MatrixXd cov_std_error;  // jackknife stderr per entry
  double cov_within_3se = 0.0;    // fraction of entries within 3 stderr

  // The Wick-exponential weight has expectation 1 under the base measure.
  double weight_mean = 0.0;
  double weight_std_error = 0.0;
  double weight_z = 0.0;
};

// Verifies the measure-change property: reweighting paths by the Wick
// exponential of <omega, f> shifts the mean of B(t) by (T_m f, T_m 1_[0,t)).
// Samples (B(t_1..k), <omega, f>) jointly by Cholesky.
GirsanovReport girsanov_check(const SmCalculus& calculus,
                              const MaskedDirection& f,
                              std::span<const double> times,
                              std::size_t n_paths, std::uint64_t seed);

}  // namespace spectral_wick
