#pragma once

#include <array>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>
#include <vector>

#include "spectral_wick/chebyshev.hpp"
#include "spectral_wick/density.hpp"
#include "spectral_wick/direction.hpp"
#include "spectral_wick/kernel.hpp"

namespace spectral_wick {

// Gaussian bump test function s(u) = amp * exp(-(u-center)^2 / (2 width^2))
// with spectrum shat(xi) = amp * width * e^{-width^2 xi^2 / 2} e^{-i xi c}.
// The probe caches its density-smoothed proxy
//
//   q(t) = F^{-1}[ m * shat ](t),   b(t) = int_0^t q(u) du,
//
// as Chebyshev series on [-domain_half, domain_half].  By Parseval these give
// exact pairings against arbitrary L^2 factors:
//
//   (T_m s, T_m g) = int q(u) g(u) du         for every g,
//
// which is what makes high-accuracy transform evaluations possible.  Under
// the white density q == s identically.
class Probe {
 public:
  Probe(SpectralDensity m, KernelConfig cfg, double center, double width,
        double amp, double domain_half = 8.0, std::size_t fit_points = 512);

  double value(double u) const;              // s(u)
  double spectrum_modulus(double xi) const;  // |shat(xi)|
  double smoothed(double t) const;           // q(t)
  double smoothed_integral(double t) const;  // b(t)
  double norm_sq() const { return norm_sq_; }
  double inner(const Probe& other) const;    // (T_m s, T_m s')

  double center() const { return center_; }
  double width() const { return width_; }
  double amp() const { return amp_; }
  double domain_half() const { return domain_half_; }
  const SpectralDensity& density() const { return density_; }

 private:
  double smoothed_by_quadrature(double t) const;

  SpectralDensity density_;
  KernelConfig cfg_;
  double center_ = 0.0;
  double width_ = 1.0;
  double amp_ = 1.0;
  double domain_half_ = 8.0;
  double norm_sq_ = 0.0;
  std::unique_ptr<ChebyshevSeries> q_;
  std::unique_ptr<ChebyshevSeries> b_;
};

struct ProbeSpec {
  double center = 0.0;
  double width = 1.0;
  double amp = 1.0;
};

// The default probe family used by the verification harnesses.
std::vector<ProbeSpec> standard_probe_specs();

// Direction together with the time window it is restricted to.
struct MaskedDirection {
  Direction f = ConstantDirection{1.0};
  double lo = 0.0;
  double hi = 1.0;
};

// Transform calculus for one spectral density: weighted pairings between
// directions, probe management, and closed transform values of the basic
// functionals.  All caches are thread-safe; results do not depend on the
// thread count.
class SmCalculus {
 public:
  explicit SmCalculus(SpectralDensity m, KernelConfig cfg = {});

  const SpectralDensity& density() const { return density_; }
  const KernelEvaluator& kernel() const { return kernel_; }
  const KernelConfig& config() const { return cfg_; }

  // Cached probe lookup.
  const Probe& probe(double center, double width, double amp = 1.0) const;
  const Probe& probe(const ProbeSpec& spec) const;

  // (T_m a, T_m b) for unmasked square-integrable directions.  Constant
  // directions are rejected (mask them first).
  double inner(const Direction& a, const Direction& b) const;

  // (T_m a, T_m (1_[lo,hi) f)).  `a` may be any direction.
  double inner_masked(const Direction& a, const MaskedDirection& f) const;

  // (T_m (1 f), T_m (1 g)) for two masked directions.  Exact for
  // constant/indicator factors; increment-sum approximation when both
  // factors are smooth bumps.
  double masked_pair_inner(const MaskedDirection& f,
                           const MaskedDirection& g) const;

  // || T_m (1_[lo,hi) f) ||^2.  Exact through the kernel for constant and
  // indicator f; increment-sum approximation (O(h^2), h ~ span/4096) for
  // smooth bumps; grid route for grid directions.
  double norm_sq_masked(const MaskedDirection& f) const;

  // Covariance matrix of the Gaussian vector
  //   ( B(t_1), ..., B(t_k), <omega, f_1>, ..., <omega, f_j> ).
  Eigen::MatrixXd joint_gram(std::span<const double> times,
                             std::span<const MaskedDirection> dirs) const;

  // ----- transform values at a probe ---------------------------------
  // c = (T_m s, T_m (1_[lo,hi) f)) is the basic building block: the
  // transform of <omega, 1 f> is c; of the n-th Wick power, c^n; of the Wick
  // exponential, e^c.
  double pairing(const Probe& s, const MaskedDirection& f) const;

  // Transform of <omega, f><omega, g>:  (s,f)(s,g) + (f,g).
  double product_pairing(const Probe& s, const MaskedDirection& f,
                         const MaskedDirection& g) const;

  // Transform of the pointwise product of Wick exponentials of f and g:
  //   exp((f,g)) * exp((s,f)) * exp((s,g)).
  double wick_exp_product(const Probe& s, const MaskedDirection& f,
                          const MaskedDirection& g) const;

  // Transform of F(X), X = <omega, g> Gaussian with variance v, probe shift
  // mu = (T_m s, T_m g): Gauss-Hermite evaluation of E[ F(mu + sqrt(v) Z) ].
  double transform_of_function(const std::function<double(double)>& F,
                               double mu, double v, int gh_order = 96) const;

  // Monte Carlo transform estimate from pre-sampled data: values phi_i of the
  // functional and samples g_i of <omega, s>, using the Wick-exponential
  // weight e^{g_i - norm_sq(s)/2}.  Returns {estimate, jackknife stderr}.
  static std::pair<double, double> transform_monte_carlo(
      std::span<const double> phi, std::span<const double> pairing_samples,
      double probe_norm_sq);

 private:
  double inner_unmasked(const Direction& a, const Direction& b) const;
  double bump_indicator_inner(const BumpDirection& s, double a,
                              double b) const;
  double masked_bump_vs_indicator(const BumpDirection& g, double glo,
                                  double ghi, double a, double b) const;
  double increment_inner(const MaskedDirection& a,
                         const MaskedDirection& b) const;
  double grid_inner(const Direction& a, const Direction& b) const;

  // Antiderivative of q_s(u) f(u) for a smooth bump factor f, fitted once
  // per (probe, bump) pair so that running pairings c(t) inside quadrature
  // loops cost one series evaluation instead of a nested integration.
  const ChebyshevSeries& bump_pairing_proxy(const Probe& s,
                                            const BumpDirection& g) const;

  SpectralDensity density_;
  KernelConfig cfg_;
  KernelEvaluator kernel_;
  mutable std::mutex probe_mutex_;
  mutable std::map<std::tuple<double, double, double>, std::unique_ptr<Probe>>
      probes_;
  mutable std::mutex pairing_mutex_;
  mutable std::map<std::array<double, 7>, std::unique_ptr<ChebyshevSeries>>
      bump_pairings_;
};

}  // namespace spectral_wick
