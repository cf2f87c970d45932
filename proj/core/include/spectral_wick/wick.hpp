#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <vector>

namespace spectral_wick {

using Rational = boost::multiprecision::cpp_rational;

// Variance-parametrized Hermite-type polynomials:
//
//   p_0 = 1,  p_1 = x,  p_{n+1}(x; v) = x p_n(x; v) - n v p_{n-1}(x; v).
//
// For a centered Gaussian X with variance v, p_n(X; v) is the Wick power
// :X^n:, and { p_n } is orthogonal with E[ p_n(X;v)^2 ] = n! v^n.

// Explicit-sum evaluation
//   p_n = sum_m  n! / (m! (n-2m)!) (-v/2)^m x^{n-2m},
// with exact rational combinatorial factors and a fixed accumulation order
// (ascending m).  Throws CoefficientOverflowError for n > 64.
double hermite_param(int n, double x, double v);

// p_0 .. p_n by the three-term recurrence (used by polynomial evaluation;
// cross-checked against the explicit sum in tests).
std::vector<double> hermite_all(int n, double x, double v);

// Element of the Wick algebra in one Gaussian variable: coefficients against
// the p_n basis, kept as exact rationals.  The variance parameter v enters
// only at evaluation time.
struct WickPolynomial {
  std::vector<Rational> coeffs;  // coeffs[n] multiplies p_n

  int degree() const;
  bool empty() const { return coeffs.empty(); }
};

// Wick product: p_a <> p_b = p_{a+b}, extended bilinearly, so coefficient
// sequences convolve.  Exact.
WickPolynomial wick_product(const WickPolynomial& a, const WickPolynomial& b);

WickPolynomial truncate(const WickPolynomial& poly, int max_degree);

// Wick exponential truncated at max_degree: sum_k p_k / k!.  (The closed form
// of the full series at variance v is exp(x - v/2).)
WickPolynomial wick_exp(int max_degree);

// Coefficients of x^n in the p-basis: x^n = sum_j c[j] v^{(n-j)/2} p_j with
// c[j] = n! / ( ((n-j)/2)! j! 2^{(n-j)/2} ) for j = n, n-2, ... ; zero
// otherwise.  Returned as c[0..n].  Throws CoefficientOverflowError n > 64.
std::vector<Rational> monomial_in_hermite(int n);

// x^n as a WickPolynomial for an exact rational variance.
WickPolynomial from_monomial(int n, const Rational& v);

// sum_n coeffs[n] p_n(x; v), accumulated in ascending degree.
double evaluate(const WickPolynomial& poly, double x, double v);

}  // namespace spectral_wick
