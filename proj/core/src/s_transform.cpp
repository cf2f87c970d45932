#include "spectral_wick/s_transform.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

#include "spectral_wick/errors.hpp"
#include "spectral_wick/parallel.hpp"
#include "spectral_wick/quadrature.hpp"
#include "spectral_wick/tm_operator.hpp"

namespace spectral_wick {

namespace {

constexpr double kSqrtTwoOverPi = 0.7978845608028654;  // sqrt(2/pi)

// e^{-g} below ~1e-24 ends the Gaussian-weighted spectral integrals.
constexpr double kGaussCut = 55.0;

// Cells per window in the increment-sum fallbacks.
constexpr std::size_t kIncrementCells = 8192;

const IndicatorDirection* as_indicator(const Direction& d) {
  return std::get_if<IndicatorDirection>(&d);
}
const ConstantDirection* as_constant(const Direction& d) {
  return std::get_if<ConstantDirection>(&d);
}
const BumpDirection* as_bump(const Direction& d) {
  return std::get_if<BumpDirection>(&d);
}
const GridDirection* as_grid(const Direction& d) {
  return std::get_if<GridDirection>(&d);
}

// Constant and indicator directions restricted to a window are themselves
// (scaled) indicators; returns {scale, interval} when that reduction applies.
struct ReducedIndicator {
  double scale = 1.0;
  double lo = 0.0;
  double hi = 0.0;
  bool empty() const { return !(lo < hi); }
};

std::optional<ReducedIndicator> reduce_to_indicator(const MaskedDirection& f) {
  if (const auto* c = as_constant(f.f)) {
    return ReducedIndicator{c->value, f.lo, f.hi};
  }
  if (const auto* i = as_indicator(f.f)) {
    return ReducedIndicator{1.0, std::max(f.lo, i->a), std::min(f.hi, i->b)};
  }
  return std::nullopt;
}

// Gaussian-weighted cosine moment of the density:
//   int_0^inf m(xi) e^{-g xi^2} cos(xi tau) dxi.
double gaussian_cos_moment(const SpectralDensity& m, double g, double tau,
                           const KernelConfig& cfg) {
  const double atau = std::abs(tau);
  double upper = std::sqrt(kGaussCut / g);
  if (m.has_compact_support()) upper = std::min(upper, *m.band_edge());
  const auto f = [&](double xi) {
    return m(xi) * std::exp(-g * xi * xi) * std::cos(xi * tau);
  };
  const auto& rule = quad::gauss_legendre(16);
  const double split = std::min(1.0, upper);
  double acc =
      quad::graded_toward_zero(f, split, cfg.graded_mesh_levels,
                               m.power_exponent().value_or(0.0), atau, rule);
  if (upper > split) {
    acc += quad::oscillation_aware(f, split, upper, atau, 0.5, rule);
  }
  return acc;
}

}  // namespace

Probe::Probe(SpectralDensity m, KernelConfig cfg, double center, double width,
             double amp, double domain_half, std::size_t fit_points)
    : density_(std::move(m)),
      cfg_(cfg),
      center_(center),
      width_(width),
      amp_(amp),
      domain_half_(domain_half) {
  if (!(width > 0.0)) throw InvalidArgumentError("probe width must be positive");
  if (!(domain_half > 0.0)) {
    throw InvalidArgumentError("probe domain_half must be positive");
  }
  if (amp_ == 0.0) return;  // the zero probe: q = b = 0, norm 0

  norm_sq_ = 2.0 * amp_ * amp_ * width_ * width_ *
             gaussian_cos_moment(density_, width_ * width_, 0.0, cfg_);

  const auto q_exact = [this](double t) { return smoothed_by_quadrature(t); };
  q_ = std::make_unique<ChebyshevSeries>(ChebyshevSeries::fit(
      q_exact, static_cast<int>(fit_points) + 1, -domain_half_, domain_half_));
  b_ = std::make_unique<ChebyshevSeries>(q_->antiderivative(0.0));
}

double Probe::value(double u) const {
  const double z = (u - center_) / width_;
  return amp_ * std::exp(-0.5 * z * z);
}

double Probe::spectrum_modulus(double xi) const {
  return std::abs(amp_) * width_ * std::exp(-0.5 * width_ * width_ * xi * xi);
}

double Probe::smoothed_by_quadrature(double t) const {
  return kSqrtTwoOverPi * amp_ * width_ *
         gaussian_cos_moment(density_, 0.5 * width_ * width_, t - center_,
                             cfg_);
}

double Probe::smoothed(double t) const {
  if (!q_) return 0.0;
  if (std::abs(t) > domain_half_) {
    throw InvalidArgumentError(
        "probe proxy evaluated outside its fitted domain");
  }
  return (*q_)(t);
}

double Probe::smoothed_integral(double t) const {
  if (!b_) return 0.0;
  if (std::abs(t) > domain_half_) {
    throw InvalidArgumentError(
        "probe proxy integral evaluated outside its fitted domain");
  }
  return (*b_)(t);
}

double Probe::inner(const Probe& other) const {
  const double g = 0.5 * (width_ * width_ + other.width_ * other.width_);
  return 2.0 * amp_ * other.amp_ * width_ * other.width_ *
         gaussian_cos_moment(density_, g, center_ - other.center_, cfg_);
}

std::vector<ProbeSpec> standard_probe_specs() {
  return {{0.0, 1.0, 1.0},
          {1.0, 0.5, 1.0},
          {-1.0, 0.5, 1.0},
          {2.0, 1.0, 1.0},
          {0.5, 0.25, 1.0}};
}

SmCalculus::SmCalculus(SpectralDensity m, KernelConfig cfg)
    : density_(std::move(m)), cfg_(cfg), kernel_(density_, cfg_) {}

const Probe& SmCalculus::probe(double center, double width, double amp) const {
  const auto key = std::make_tuple(center, width, amp);
  std::lock_guard lock(probe_mutex_);
  auto it = probes_.find(key);
  if (it == probes_.end()) {
    it = probes_
             .emplace(key, std::make_unique<Probe>(density_, cfg_, center,
                                                   width, amp))
             .first;
  }
  return *it->second;
}

const Probe& SmCalculus::probe(const ProbeSpec& spec) const {
  return probe(spec.center, spec.width, spec.amp);
}

double SmCalculus::bump_indicator_inner(const BumpDirection& s, double a,
                                        double b) const {
  const Probe& p = probe(s.center, s.width, s.amp);
  return p.smoothed_integral(b) - p.smoothed_integral(a);
}

double SmCalculus::grid_inner(const Direction& a, const Direction& b) const {
  const GridSpec spec = as_grid(a) ? as_grid(a)->f.grid : as_grid(b)->f.grid;
  return inner_product_tm(to_grid(a, spec), to_grid(b, spec), density_);
}

double SmCalculus::inner_unmasked(const Direction& a,
                                  const Direction& b) const {
  if (as_constant(a) || as_constant(b)) {
    throw DomainViolationError(
        "constant directions are not square-integrable; restrict them to a "
        "window first");
  }
  if (as_grid(a) || as_grid(b)) return grid_inner(a, b);

  if (const auto* sa = as_bump(a)) {
    if (const auto* sb = as_bump(b)) {
      return probe(sa->center, sa->width, sa->amp)
          .inner(probe(sb->center, sb->width, sb->amp));
    }
    const auto* ib = as_indicator(b);
    return bump_indicator_inner(*sa, ib->a, ib->b);
  }
  const auto* ia = as_indicator(a);
  if (const auto* sb = as_bump(b)) {
    return bump_indicator_inner(*sb, ia->a, ia->b);
  }
  const auto* ib = as_indicator(b);
  // (T_m 1_[a,b), T_m 1_[c,d)) = E[(B_b - B_a)(B_d - B_c)] expressed
  // through the increment variance r.
  const double va = ia->a, vb = ia->b, vc = ib->a, vd = ib->b;
  return 0.5 * (kernel_.variance_r(vb - vc) + kernel_.variance_r(va - vd) -
                kernel_.variance_r(va - vc) - kernel_.variance_r(vb - vd));
}

double SmCalculus::inner(const Direction& a, const Direction& b) const {
  return inner_unmasked(a, b);
}

double SmCalculus::masked_bump_vs_indicator(const BumpDirection& g, double glo,
                                            double ghi, double a,
                                            double b) const {
  // (T_m (1_[glo,ghi) g), T_m 1_[a,b)) = E[ (int_glo^ghi g dB) (B_b - B_a) ].
  // Integrating int g dB by parts,
  //   phi(t) = E[ (int g dB) B_t ]
  //          = g(ghi) K(ghi, t) - g(glo) K(glo, t) - int g'(u) K(u, t) du,
  // and the answer is phi(b) - phi(a).
  const Direction gd = g;
  const auto phi = [&](double t) -> double {
    const auto integrand = [&](double u) {
      const double z = (u - g.center) / g.width;
      const double gprime = -g.amp * z / g.width * std::exp(-0.5 * z * z);
      return gprime * kernel_.covariance(u, t);
    };
    std::vector<double> pts = {glo, ghi};
    if (t > glo && t < ghi) pts.insert(pts.begin() + 1, t);
    const double tail =
        quad::adaptive_segments(integrand, pts, cfg_.abs_tol * 10.0);
    return evaluate(gd, ghi) * kernel_.covariance(ghi, t) -
           evaluate(gd, glo) * kernel_.covariance(glo, t) - tail;
  };
  return phi(b) - phi(a);
}

double SmCalculus::increment_inner(const MaskedDirection& a,
                                   const MaskedDirection& b) const {
  // Increment-sum approximation on a shared uniform partition of the union
  // window:  E[(sum_i a_i dB_i)(sum_j b_j dB_j)] with the Toeplitz increment
  // covariance  E[dB_i dB_j] = (r((d+1)h) + r((d-1)h) - 2 r(dh)) / 2,
  // d = i - j.  Accuracy O(h^2) for smooth factors.
  const double lo = std::min(a.lo, b.lo);
  const double hi = std::max(a.hi, b.hi);
  if (!(lo < hi)) return 0.0;
  const std::size_t n = kIncrementCells;
  const double h = (hi - lo) / static_cast<double>(n);

  std::vector<double> av(n), bv(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = lo + (static_cast<double>(i) + 0.5) * h;
    av[i] = (u >= a.lo && u < a.hi) ? evaluate(a.f, u) : 0.0;
    bv[i] = (u >= b.lo && u < b.hi) ? evaluate(b.f, u) : 0.0;
  }
  std::vector<double> rv(n + 1);
  parallel_for(n + 1, [&](std::size_t klo, std::size_t khi) {
    for (std::size_t k = klo; k < khi; ++k) {
      rv[k] = kernel_.variance_r(static_cast<double>(k) * h);
    }
  });

  double acc = 0.0;
  for (std::size_t d = 0; d < n; ++d) {
    const double cd =
        d == 0 ? rv[1] : 0.5 * (rv[d + 1] + rv[d - 1] - 2.0 * rv[d]);
    double diag = 0.0;
    if (d == 0) {
      for (std::size_t i = 0; i < n; ++i) diag += av[i] * bv[i];
    } else {
      for (std::size_t i = d; i < n; ++i) {
        diag += av[i] * bv[i - d] + bv[i] * av[i - d];
      }
    }
    acc += cd * diag;
  }
  return acc;
}

double SmCalculus::norm_sq_masked(const MaskedDirection& f) const {
  if (!(f.lo < f.hi)) return 0.0;
  if (const auto red = reduce_to_indicator(f)) {
    if (red->empty()) return 0.0;
    return red->scale * red->scale * kernel_.variance_r(red->hi - red->lo);
  }
  if (const auto* g = as_grid(f.f)) {
    return norm_tm_sq(apply_mask(g->f, f.lo, f.hi), density_);
  }
  return increment_inner(f, f);
}

double SmCalculus::inner_masked(const Direction& a,
                                const MaskedDirection& f) const {
  if (!(f.lo < f.hi)) return 0.0;

  if (const auto red = reduce_to_indicator(f)) {
    if (red->empty()) return 0.0;
    return red->scale *
           inner_unmasked(a, IndicatorDirection{red->lo, red->hi});
  }
  if (const auto* gr = as_grid(f.f)) {
    const GridSpec spec = gr->f.grid;
    return inner_product_tm(to_grid(a, spec), apply_mask(gr->f, f.lo, f.hi),
                            density_);
  }

  const auto* g = as_bump(f.f);
  if (const auto* s = as_bump(a)) {
    // (T_m s, T_m (1 g)) = int_lo^hi q_s(u) g(u) du  by the proxy identity.
    const Probe& p = probe(s->center, s->width, s->amp);
    const Direction gd = f.f;
    const auto integrand = [&](double u) {
      return p.smoothed(u) * evaluate(gd, u);
    };
    return quad::adaptive(integrand, f.lo, f.hi, cfg_.abs_tol * 10.0);
  }
  if (const auto* i = as_indicator(a)) {
    return masked_bump_vs_indicator(*g, f.lo, f.hi, i->a, i->b);
  }
  if (const auto* gr = as_grid(a)) {
    const GridSpec spec = gr->f.grid;
    return inner_product_tm(gr->f, apply_mask(to_grid(f.f, spec), f.lo, f.hi),
                            density_);
  }
  throw DomainViolationError(
      "constant directions are not square-integrable; restrict them to a "
      "window first");
}

double SmCalculus::masked_pair_inner(const MaskedDirection& a,
                                     const MaskedDirection& b) const {
  if (!(a.lo < a.hi) || !(b.lo < b.hi)) return 0.0;
  if (const auto red = reduce_to_indicator(a)) {
    if (red->empty()) return 0.0;
    return red->scale *
           inner_masked(IndicatorDirection{red->lo, red->hi}, b);
  }
  if (const auto red = reduce_to_indicator(b)) {
    if (red->empty()) return 0.0;
    return red->scale *
           inner_masked(IndicatorDirection{red->lo, red->hi}, a);
  }
  if (const auto* ga = as_grid(a.f)) {
    const GridSpec spec = ga->f.grid;
    return inner_product_tm(apply_mask(ga->f, a.lo, a.hi),
                            apply_mask(to_grid(b.f, spec), b.lo, b.hi),
                            density_);
  }
  if (const auto* gb = as_grid(b.f)) {
    const GridSpec spec = gb->f.grid;
    return inner_product_tm(apply_mask(to_grid(a.f, spec), a.lo, a.hi),
                            apply_mask(gb->f, b.lo, b.hi), density_);
  }
  return increment_inner(a, b);
}

Eigen::MatrixXd SmCalculus::joint_gram(
    std::span<const double> times,
    std::span<const MaskedDirection> dirs) const {
  const std::size_t k = times.size();
  const std::size_t j = dirs.size();
  for (double t : times) {
    if (t < 0.0) {
      throw InvalidArgumentError("joint_gram requires nonnegative times");
    }
  }
  Eigen::MatrixXd out(k + j, k + j);
  for (std::size_t r = 0; r < k; ++r) {
    for (std::size_t c = 0; c <= r; ++c) {
      const double v = kernel_.covariance(times[r], times[c]);
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
      out(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(r)) = v;
    }
  }
  for (std::size_t d = 0; d < j; ++d) {
    for (std::size_t r = 0; r < k; ++r) {
      double v = 0.0;
      if (times[r] > 0.0) {
        v = inner_masked(IndicatorDirection{0.0, times[r]}, dirs[d]);
      }
      out(static_cast<Eigen::Index>(k + d), static_cast<Eigen::Index>(r)) = v;
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k + d)) = v;
    }
    for (std::size_t e = 0; e <= d; ++e) {
      const double v = (e == d) ? norm_sq_masked(dirs[d])
                                : masked_pair_inner(dirs[d], dirs[e]);
      out(static_cast<Eigen::Index>(k + d), static_cast<Eigen::Index>(k + e)) =
          v;
      out(static_cast<Eigen::Index>(k + e), static_cast<Eigen::Index>(k + d)) =
          v;
    }
  }
  return out;
}

double SmCalculus::pairing(const Probe& s, const MaskedDirection& f) const {
  if (!(f.lo < f.hi)) return 0.0;
  if (s.amp() == 0.0) return 0.0;
  if (const auto red = reduce_to_indicator(f)) {
    if (red->empty()) return 0.0;
    return red->scale *
           (s.smoothed_integral(red->hi) - s.smoothed_integral(red->lo));
  }
  if (const auto* gr = as_grid(f.f)) {
    // Piecewise-constant factor: cellwise exact with the proxy integral.
    const GridSpec& spec = gr->f.grid;
    double acc = 0.0;
    for (std::size_t j = 0; j < spec.count; ++j) {
      const double cl = std::max(spec.point(j) - spec.step / 2.0, f.lo);
      const double ch = std::min(spec.point(j) + spec.step / 2.0, f.hi);
      if (ch <= cl || gr->f.values[j] == 0.0) continue;
      acc += gr->f.values[j] *
             (s.smoothed_integral(ch) - s.smoothed_integral(cl));
    }
    return acc;
  }
  if (const auto* bump = std::get_if<BumpDirection>(&f.f)) {
    const ChebyshevSeries& anti = bump_pairing_proxy(s, *bump);
    const double lo = std::clamp(f.lo, anti.lower(), anti.upper());
    const double hi = std::clamp(f.hi, anti.lower(), anti.upper());
    return anti(hi) - anti(lo);
  }
  const Direction fd = f.f;
  const auto integrand = [&](double u) {
    return s.smoothed(u) * evaluate(fd, u);
  };
  return quad::adaptive(integrand, f.lo, f.hi, cfg_.abs_tol * 10.0);
}

const ChebyshevSeries& SmCalculus::bump_pairing_proxy(
    const Probe& s, const BumpDirection& g) const {
  const std::array<double, 7> key{s.center(),    s.width(), s.amp(),
                                  s.domain_half(), g.center, g.width,
                                  g.amp};
  {
    std::lock_guard lock(pairing_mutex_);
    const auto it = bump_pairings_.find(key);
    if (it != bump_pairings_.end()) return *it->second;
  }
  const double lo = -s.domain_half();
  const double hi = s.domain_half();
  const auto product = [&s, &g](double u) {
    return s.smoothed(u) * evaluate(Direction{g}, u);
  };
  // Escalate the fit order until the coefficient tail is negligible (narrow
  // bumps need mid-domain resolution ~ pi * domain / points).
  std::unique_ptr<ChebyshevSeries> anti;
  for (const int points : {513, 2049, 8193}) {
    ChebyshevSeries fit = ChebyshevSeries::fit(product, points, lo, hi);
    const bool converged =
        fit.tail_magnitude(std::max(8, points / 64)) <=
        1e-13 * std::max(1.0, fit.max_coefficient());
    if (converged || points == 8193) {
      anti = std::make_unique<ChebyshevSeries>(fit.antiderivative(lo));
      break;
    }
  }
  std::lock_guard lock(pairing_mutex_);
  const auto [it, inserted] = bump_pairings_.emplace(key, std::move(anti));
  return *it->second;
}

double SmCalculus::product_pairing(const Probe& s, const MaskedDirection& f,
                                   const MaskedDirection& g) const {
  return pairing(s, f) * pairing(s, g) + masked_pair_inner(f, g);
}

double SmCalculus::wick_exp_product(const Probe& s, const MaskedDirection& f,
                                    const MaskedDirection& g) const {
  return std::exp(masked_pair_inner(f, g)) * std::exp(pairing(s, f)) *
         std::exp(pairing(s, g));
}

double SmCalculus::transform_of_function(
    const std::function<double(double)>& F, double mu, double v,
    int gh_order) const {
  if (v < 0.0) {
    if (v > -1e-10) {
      v = 0.0;
    } else {
      throw InvalidArgumentError("transform_of_function: negative variance");
    }
  }
  if (v == 0.0) return F(mu);
  const auto& rule = quad::gauss_hermite(std::max(gh_order, 64));
  const double sigma = std::sqrt(2.0 * v);
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double x = F(mu + sigma * rule.nodes[i]);
    if (!std::isfinite(x)) {
      throw QuadratureError(
          "transform_of_function: integrand not finite at a Hermite node");
    }
    acc += rule.weights[i] * x;
  }
  return acc / std::sqrt(std::numbers::pi);
}

std::pair<double, double> SmCalculus::transform_monte_carlo(
    std::span<const double> phi, std::span<const double> pairing_samples,
    double probe_norm_sq) {
  if (phi.size() != pairing_samples.size() || phi.empty()) {
    throw InvalidArgumentError(
        "transform_monte_carlo needs matching nonempty sample arrays");
  }
  const std::size_t n = phi.size();
  std::vector<double> prods(n);
  for (std::size_t i = 0; i < n; ++i) {
    prods[i] = std::exp(pairing_samples[i] - 0.5 * probe_norm_sq) * phi[i];
  }
  const double mean = pairwise_sum(prods.data(), n) / static_cast<double>(n);
  std::vector<double> sq(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = prods[i] - mean;
    sq[i] = d * d;
  }
  const double var = pairwise_sum(sq.data(), n) / static_cast<double>(n - 1);
  return {mean, std::sqrt(var / static_cast<double>(n))};
}

}  // namespace spectral_wick
