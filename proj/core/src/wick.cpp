#include "spectral_wick/wick.hpp"

#include <cmath>

#include "spectral_wick/errors.hpp"

namespace spectral_wick {

namespace {

using BigInt = boost::multiprecision::cpp_int;

constexpr int kMaxDegree = 64;

void check_degree(int n, const char* where) {
  if (n < 0) throw InvalidArgumentError(std::string(where) + ": negative degree");
  if (n > kMaxDegree) {
    throw CoefficientOverflowError(std::string(where) +
                                   ": degree above the supported bound 64");
  }
}

BigInt factorial(int n) {
  BigInt acc = 1;
  for (int k = 2; k <= n; ++k) acc *= k;
  return acc;
}

}  // namespace

double hermite_param(int n, double x, double v) {
  check_degree(n, "hermite_param");
  double acc = 0.0;
  for (int m = 0; m <= n / 2; ++m) {
    const Rational c(factorial(n), factorial(m) * factorial(n - 2 * m));
    const double term = static_cast<double>(c) *
                        std::pow(-0.5 * v, m) * std::pow(x, n - 2 * m);
    acc += term;
  }
  return acc;
}

std::vector<double> hermite_all(int n, double x, double v) {
  check_degree(n, "hermite_all");
  std::vector<double> p(static_cast<std::size_t>(n) + 1);
  p[0] = 1.0;
  if (n >= 1) p[1] = x;
  for (int k = 1; k < n; ++k) {
    p[k + 1] = x * p[k] - static_cast<double>(k) * v * p[k - 1];
  }
  return p;
}

int WickPolynomial::degree() const {
  for (std::size_t i = coeffs.size(); i > 0; --i) {
    if (coeffs[i - 1] != 0) return static_cast<int>(i - 1);
  }
  return -1;
}

WickPolynomial wick_product(const WickPolynomial& a, const WickPolynomial& b) {
  if (a.empty() || b.empty()) return {};
  const int deg = static_cast<int>(a.coeffs.size() + b.coeffs.size()) - 2;
  check_degree(deg, "wick_product");
  WickPolynomial out;
  out.coeffs.assign(a.coeffs.size() + b.coeffs.size() - 1, Rational(0));
  for (std::size_t i = 0; i < a.coeffs.size(); ++i) {
    if (a.coeffs[i] == 0) continue;
    for (std::size_t j = 0; j < b.coeffs.size(); ++j) {
      out.coeffs[i + j] += a.coeffs[i] * b.coeffs[j];
    }
  }
  return out;
}

WickPolynomial truncate(const WickPolynomial& poly, int max_degree) {
  WickPolynomial out = poly;
  if (max_degree < 0) {
    out.coeffs.clear();
    return out;
  }
  if (out.coeffs.size() > static_cast<std::size_t>(max_degree) + 1) {
    out.coeffs.resize(static_cast<std::size_t>(max_degree) + 1);
  }
  return out;
}

WickPolynomial wick_exp(int max_degree) {
  check_degree(max_degree, "wick_exp");
  WickPolynomial out;
  out.coeffs.resize(static_cast<std::size_t>(max_degree) + 1);
  for (int k = 0; k <= max_degree; ++k) {
    out.coeffs[k] = Rational(1, factorial(k));
  }
  return out;
}

std::vector<Rational> monomial_in_hermite(int n) {
  check_degree(n, "monomial_in_hermite");
  std::vector<Rational> c(static_cast<std::size_t>(n) + 1, Rational(0));
  for (int m = 0; m <= n / 2; ++m) {
    const int j = n - 2 * m;
    BigInt denom = factorial(m) * factorial(j);
    denom <<= m;  // times 2^m
    c[j] = Rational(factorial(n), denom);
  }
  return c;
}

WickPolynomial from_monomial(int n, const Rational& v) {
  const auto base = monomial_in_hermite(n);
  WickPolynomial out;
  out.coeffs.assign(base.size(), Rational(0));
  for (int j = n; j >= 0; j -= 2) {
    Rational vpow = 1;
    for (int k = 0; k < (n - j) / 2; ++k) vpow *= v;
    out.coeffs[j] = base[j] * vpow;
  }
  return out;
}

double evaluate(const WickPolynomial& poly, double x, double v) {
  if (poly.empty()) return 0.0;
  const int deg = static_cast<int>(poly.coeffs.size()) - 1;
  check_degree(deg, "evaluate");
  const auto p = hermite_all(deg, x, v);
  double acc = 0.0;
  for (std::size_t k = 0; k < poly.coeffs.size(); ++k) {
    acc += static_cast<double>(poly.coeffs[k]) * p[k];
  }
  return acc;
}

}  // namespace spectral_wick
