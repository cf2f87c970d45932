#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "spectral_wick/s_transform.hpp"

namespace spectral_wick {

// Integrand forms for the Wick-Ito integral
//
//   I = int_a^b Y_t f(t) dB_t,      X_t = <omega, 1_[0,t) f>,
//
// characterized through the transform:  at probe s,
//
//   S[I](s) = int_a^b S[Y_t](s) f(t) q_s(t) dt,
//
// with q_s the probe's density-smoothed proxy (dS[B_t](s)/dt = q_s(t)).
// The window [a, b] and the weight f live in IntegrandSpec::f.

struct DeterministicIntegrand {};          // Y_t = 1
struct WickChainIntegrand { int degree = 1; };  // Y_t = p_n(X_t; v(t))
struct WickExpIntegrand {};                // Y_t = Wick exponential of X_t
struct PathPowerIntegrand { int power = 1; };   // Y_t = X_t^power
struct SmoothIntegrand {                   // Y_t = F(X_t)
  std::function<double(double)> F;
  std::string name = "F";
};

using IntegrandKind =
    std::variant<DeterministicIntegrand, WickChainIntegrand, WickExpIntegrand,
                 PathPowerIntegrand, SmoothIntegrand>;

struct IntegrandSpec {
  IntegrandKind kind = DeterministicIntegrand{};
  MaskedDirection f;  // weight and window: integrate over [f.lo, f.hi]
};

// Running variance v(t) = ||T_m 1_[0,t) f||^2 and its derivative.  Exact
// kernel formulas for constant/indicator f; Chebyshev-fitted increment sums
// for smooth bumps.  v is piecewise smooth; breakpoints() lists the interior
// times where v' may jump (indicator edges, the grid horizon) so integrators
// can split there.  The derivative uses central differences with one
// Richardson extrapolation, switching to one-sided stencils beside t = 0 and
// the breakpoints, and throws DerivativeInstabilityError when the
// extrapolation ladder disagrees with itself, which happens when v' blows up
// (e.g. Hurst < 1/2 at t -> 0).
class VarianceCurve {
 public:
  VarianceCurve(const SmCalculus& calculus, const MaskedDirection& f,
                double t_max);
  double value(double t) const;
  double derivative(double t) const;
  const std::vector<double>& breakpoints() const { return kinks_; }

 private:
  std::function<double(double)> v_;
  double t_max_;
  double step_;
  std::vector<double> kinks_;
};

// S[I](s) by adaptive quadrature of S[Y_t](s) f(t) q_s(t).
double integrate_numeric(const SmCalculus& calculus, const IntegrandSpec& spec,
                         const Probe& s, double quad_tol = 1e-8);

// Closed transform value of the integral:
//   deterministic   ->  pairing of s with the window        (I = <omega, 1 f>)
//   Wick power n    ->  (c(b)^{n+1} - c(a)^{n+1}) / (n+1)
//   Wick exp        ->  e^{c(b)} - e^{c(a)}
//   path power 1    ->  (c(b)^2 - c(a)^2) / 2
//   path power 2    ->  (c(b)^3 - c(a)^3) / 3 + int v f q_s  (Wiener term)
// Throws InvalidArgumentError for forms without a closed value (smooth F,
// path powers >= 3).
double integrate_closed(const SmCalculus& calculus, const IntegrandSpec& spec,
                        const Probe& s);

// E[ Y_t^2 ] for the spec's integrand at time t (closed Gaussian moments);
// the square-integrability surrogate used before numerical integration.
double integrand_second_moment(const SmCalculus& calculus,
                               const IntegrandSpec& spec, double t);

struct IntegralCheck {
  double closed = 0.0;
  double numeric = 0.0;
  double abs_error = 0.0;
};

IntegralCheck verify_integral(const SmCalculus& calculus,
                              const IntegrandSpec& spec, const Probe& s);

// Chain-rule data for the change-of-variable formula.
struct FRecord {
  std::function<double(double)> F;
  std::function<double(double)> dF;
  std::function<double(double)> d2F;
  std::string name = "F";
};

struct ItoProbeResult {
  ProbeSpec probe;
  double lhs = 0.0;      // S[F(X_b)] - S[F(X_a)]
  double db_term = 0.0;  // S[int F'(X) f dB]
  double dt_term = 0.0;  // 1/2 int S[F''(X_t)] v'(t) dt
  double abs_error = 0.0;
};

struct ItoReport {
  std::vector<ItoProbeResult> probe_results;  // entry 0 is the zero probe
  double max_abs_error = 0.0;
  bool mc_ran = false;
  double mc_mean = 0.0;       // Monte Carlo mean of F(X_b)
  double mc_std_error = 0.0;
  double mc_reference = 0.0;  // Gauss-Hermite expectation of F(X_b)
  double mc_z = 0.0;
};

struct ItoOptions {
  std::size_t mc_paths = 0;  // 0 disables the Monte Carlo level
  std::uint64_t seed = 0;
  int gh_order = 96;
  double quad_tol = 1e-8;
};

// Change-of-variable check
//   F(X_b) - F(X_a) = int_a^b F'(X_t) f(t) dB_t + 1/2 int_a^b F''(X_t) v'(t) dt
// verified at the transform level on the zero probe (pure expectations) and
// each supplied probe, plus an optional Monte Carlo consistency test of the
// Gaussian law of X_b.
ItoReport ito_check(const SmCalculus& calculus, const FRecord& record,
                    const MaskedDirection& f,
                    std::span<const ProbeSpec> probes, const ItoOptions& opts);

}  // namespace spectral_wick
