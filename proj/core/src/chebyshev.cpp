#include "spectral_wick/chebyshev.hpp"

#include <cmath>
#include <numbers>

#include "spectral_wick/errors.hpp"

namespace spectral_wick {

ChebyshevSeries::ChebyshevSeries(double a, double b, std::vector<double> coeffs)
    : a_(a), b_(b), coeffs_(std::move(coeffs)) {
  if (!(b_ > a_)) throw InvalidArgumentError("ChebyshevSeries: need b > a");
  if (coeffs_.empty()) coeffs_.push_back(0.0);
}

ChebyshevSeries ChebyshevSeries::fit(const std::function<double(double)>& f,
                                     int points, double a, double b) {
  if (points < 2) throw InvalidArgumentError("ChebyshevSeries::fit: points < 2");
  const int n = points - 1;  // polynomial degree
  std::vector<double> values(points);
  for (int j = 0; j <= n; ++j) {
    const double x = std::cos(std::numbers::pi * j / n);  // Lobatto nodes
    values[j] = f(0.5 * (a + b) + 0.5 * (b - a) * x);
  }
  // DCT-I, direct O(n^2): c_k = (2/n) sum'' f(x_j) cos(pi j k / n).
  std::vector<double> coeffs(points);
  for (int k = 0; k <= n; ++k) {
    double acc = 0.5 * (values[0] + (k % 2 == 0 ? values[n] : -values[n]));
    for (int j = 1; j < n; ++j) {
      acc += values[j] * std::cos(std::numbers::pi * j * k / n);
    }
    coeffs[k] = 2.0 * acc / n;
  }
  coeffs[0] *= 0.5;
  coeffs[n] *= 0.5;
  return ChebyshevSeries(a, b, std::move(coeffs));
}

double ChebyshevSeries::operator()(double x) const {
  const double t = (2.0 * x - (a_ + b_)) / (b_ - a_);
  double b1 = 0.0, b2 = 0.0;
  for (std::size_t k = coeffs_.size(); k-- > 1;) {
    const double b0 = 2.0 * t * b1 - b2 + coeffs_[k];
    b2 = b1;
    b1 = b0;
  }
  return t * b1 - b2 + coeffs_[0];
}

ChebyshevSeries ChebyshevSeries::antiderivative(double x0) const {
  const std::size_t n = coeffs_.size();
  std::vector<double> out(n + 1, 0.0);
  const double scale = 0.5 * (b_ - a_);
  auto c = [&](std::size_t k) { return k < n ? coeffs_[k] : 0.0; };
  for (std::size_t k = 1; k <= n; ++k) {
    const double prev = (k == 1) ? 2.0 * c(0) : c(k - 1);
    out[k] = scale * (prev - c(k + 1)) / (2.0 * static_cast<double>(k));
  }
  ChebyshevSeries result(a_, b_, std::move(out));
  result.coeffs_[0] -= result(x0);
  return result;
}

ChebyshevSeries ChebyshevSeries::derivative() const {
  const std::size_t n = coeffs_.size();
  std::vector<double> out(n > 1 ? n - 1 : 1, 0.0);
  if (n > 1) {
    const double scale = 2.0 / (b_ - a_);
    // backward recurrence: d_{k-1} = d_{k+1} + 2k c_k  (then d_0 halved)
    std::vector<double> d(n + 1, 0.0);
    for (std::size_t k = n - 1; k >= 1; --k) {
      d[k - 1] = d[k + 1] + scale * 2.0 * static_cast<double>(k) * coeffs_[k];
      if (k == 1) break;
    }
    d[0] *= 0.5;
    for (std::size_t k = 0; k + 1 < n; ++k) out[k] = d[k];
  }
  return ChebyshevSeries(a_, b_, std::move(out));
}

double ChebyshevSeries::tail_magnitude(int count) const {
  double m = 0.0;
  const std::size_t n = coeffs_.size();
  const std::size_t begin = count >= static_cast<int>(n)
                                ? 0
                                : n - static_cast<std::size_t>(count);
  for (std::size_t k = begin; k < n; ++k) m = std::max(m, std::abs(coeffs_[k]));
  return m;
}

double ChebyshevSeries::max_coefficient() const {
  double m = 0.0;
  for (double c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

}  // namespace spectral_wick
