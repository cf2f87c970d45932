#pragma once

#include <functional>
#include <vector>

namespace spectral_wick {

// Chebyshev series proxy for a smooth function on [a, b].  Built once from
// point evaluations at Chebyshev-Lobatto nodes; evaluation is Clenshaw
// recurrence.  The antiderivative/derivative transforms are exact on the
// coefficients, which keeps paired quantities (e.g. a cumulative integral and
// its integrand) consistent to machine precision.
class ChebyshevSeries {
 public:
  ChebyshevSeries() = default;
  ChebyshevSeries(double a, double b, std::vector<double> coeffs);

  // Interpolates f at `points` Chebyshev-Lobatto nodes (points >= 2).
  static ChebyshevSeries fit(const std::function<double(double)>& f,
                             int points, double a, double b);

  double operator()(double x) const;

  // Antiderivative vanishing at x0 (x0 must lie in [a, b]).
  ChebyshevSeries antiderivative(double x0) const;
  ChebyshevSeries derivative() const;

  // Largest |coefficient| among the trailing `count` coefficients; a cheap
  // convergence diagnostic for the fit.
  double tail_magnitude(int count) const;
  double max_coefficient() const;

  double lower() const { return a_; }
  double upper() const { return b_; }
  const std::vector<double>& coefficients() const { return coeffs_; }

 private:
  double a_ = -1.0;
  double b_ = 1.0;
  std::vector<double> coeffs_;
};

}  // namespace spectral_wick
