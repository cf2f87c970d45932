#include "spectral_wick/quadrature.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "spectral_wick/errors.hpp"

namespace spectral_wick::quad {

namespace {

GaussRule make_legendre(int n) {
  if (n < 1) throw InvalidArgumentError("gauss_legendre: order must be >= 1");
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Chebyshev-like initial guess, then Newton on P_n(x).
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;  // exact middle node
  return rule;
}

GaussRule make_hermite(int n) {
  if (n < 1) throw InvalidArgumentError("gauss_hermite: order must be >= 1");
  // Jacobi matrix for the (physicists') Hermite recurrence: diagonal 0,
  // off-diagonal sqrt(k/2).
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = std::sqrt(k / 2.0);
    jacobi(k, k - 1) = b;
    jacobi(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double mu0 = std::sqrt(std::numbers::pi);  // int e^{-x^2} dx
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = solver.eigenvalues()(i);
    const double v = solver.eigenvectors()(0, i);
    rule.weights[i] = mu0 * v * v;
  }
  return rule;
}

const GaussRule& cached(std::map<int, GaussRule>& cache, std::mutex& mutex,
                        int order, GaussRule (*factory)(int)) {
  std::lock_guard lock(mutex);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, factory(order)).first;
  return it->second;
}

double simpson(double fa, double fm, double fb, double h) {
  return h / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_impl(const Integrand& f, double a, double b, double fa,
                     double fm, double fb, double whole, double tol,
                     int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(fa, flm, fm, m - a);
  const double right = simpson(fm, frm, fb, b - m);
  const double delta = left + right - whole;
  if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  if (depth <= 0) {
    throw QuadratureError(
        "adaptive quadrature: refinement budget exhausted before reaching the "
        "requested tolerance");
  }
  return adaptive_impl(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_impl(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

const GaussRule& gauss_legendre(int order) {
  static std::map<int, GaussRule> cache;
  static std::mutex mutex;
  return cached(cache, mutex, order, make_legendre);
}

const GaussRule& gauss_hermite(int order) {
  static std::map<int, GaussRule> cache;
  static std::mutex mutex;
  return cached(cache, mutex, order, make_hermite);
}

double gl_panel(const Integrand& f, double a, double b, const GaussRule& rule) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    acc += rule.weights[i] * f(mid + half * rule.nodes[i]);
  }
  return acc * half;
}

double composite(const Integrand& f, std::span<const double> edges,
                 const GaussRule& rule) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    acc += gl_panel(f, edges[i], edges[i + 1], rule);
  }
  return acc;
}

double oscillation_aware(const Integrand& f, double a, double b,
                         double osc_freq, double max_width,
                         const GaussRule& rule) {
  if (!(b > a)) return 0.0;
  double width = max_width;
  if (osc_freq > 0.0) width = std::min(width, std::numbers::pi / osc_freq);
  const auto panels =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil((b - a) / width)));
  const double h = (b - a) / static_cast<double>(panels);
  double acc = 0.0;
  for (std::size_t i = 0; i < panels; ++i) {
    const double lo = a + h * static_cast<double>(i);
    const double hi = (i + 1 == panels) ? b : lo + h;
    acc += gl_panel(f, lo, hi, rule);
  }
  return acc;
}

double graded_toward_zero(const Integrand& f, double upper, int min_levels,
                          double power_hint, double osc_freq,
                          const GaussRule& rule) {
  if (!(upper > 0.0)) return 0.0;
  // Depth so that the dropped head below the last cell is ~1e-14 of the mass:
  // the remaining integral scales like (2^-L)^(p+1).
  const double p1 = std::max(power_hint + 1.0, 0.05);
  const int needed = static_cast<int>(std::ceil(46.5 / (p1 * std::numbers::ln2)));
  const int levels = std::clamp(std::max(min_levels, needed), 8, 500);
  double acc = 0.0;
  double hi = upper;
  for (int j = 0; j < levels; ++j) {
    const double lo = hi * 0.5;
    acc += oscillation_aware(f, lo, hi, osc_freq, hi - lo, rule);
    hi = lo;
  }
  return acc;
}

double adaptive(const Integrand& f, double a, double b, double abs_tol,
                int max_depth) {
  if (a == b) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = simpson(fa, fm, fb, b - a);
  return adaptive_impl(f, a, b, fa, fm, fb, whole, abs_tol, max_depth);
}

double adaptive_segments(const Integrand& f, std::span<const double> points,
                         double abs_tol, int max_depth) {
  if (points.size() < 2) return 0.0;
  const double span = points.back() - points.front();
  if (span == 0.0) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    const double a = points[i];
    const double b = points[i + 1];
    if (a == b) continue;
    acc += adaptive(f, a, b, abs_tol * std::abs(b - a) / std::abs(span),
                    max_depth);
  }
  return acc;
}

double alternating_series_limit(std::span<const double> terms) {
  if (terms.empty()) return 0.0;
  std::vector<double> table(terms.size());
  double partial = 0.0;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    partial += terms[i];
    table[i] = partial;
  }
  // van Wijngaarden: repeatedly average adjacent partial sums.
  std::size_t n = table.size();
  while (n > 1) {
    for (std::size_t i = 0; i + 1 < n; ++i) {
      table[i] = 0.5 * (table[i] + table[i + 1]);
    }
    --n;
  }
  return table[0];
}

double cos_tail(const Integrand& envelope, double freq, double from,
                int half_periods) {
  if (!(freq > 0.0)) {
    throw InvalidArgumentError("cos_tail requires a positive frequency");
  }
  const auto f = [&](double xi) { return envelope(xi) * std::cos(freq * xi); };
  const GaussRule& rule = gauss_legendre(16);
  // First zero of cos(freq xi) at or beyond `from`: freq xi = (k + 1/2) pi.
  const double k0 = std::ceil(freq * from / std::numbers::pi - 0.5);
  double z = (k0 + 0.5) * std::numbers::pi / freq;
  if (z < from) z += std::numbers::pi / freq;
  double acc = gl_panel(f, from, z, rule);
  std::vector<double> terms;
  terms.reserve(half_periods);
  const double h = std::numbers::pi / freq;
  for (int j = 0; j < half_periods; ++j) {
    terms.push_back(gl_panel(f, z, z + h, rule));
    z += h;
  }
  return acc + alternating_series_limit(terms);
}

}  // namespace spectral_wick::quad
