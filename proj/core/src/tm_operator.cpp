#include "spectral_wick/tm_operator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "spectral_wick/errors.hpp"
#include "spectral_wick/fft.hpp"
#include "spectral_wick/quadrature.hpp"

namespace spectral_wick {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kInvSqrtTwoPi = 0.3989422804014327;  // (2*pi)^{-1/2}

double signed_frequency(std::size_t k, std::size_t n, double dxi) {
  const auto half = n / 2;
  const double idx = k <= half ? static_cast<double>(k)
                               : static_cast<double>(k) - static_cast<double>(n);
  return idx * dxi;
}

// Cell average of m(xi)^power over the central bin [-dxi/2, dxi/2].  Exact
// for pure-power densities; 16-point Gauss otherwise (nodes stay off 0).
double central_bin_average(const SpectralDensity& m, double dxi, double power) {
  const double d = dxi / 2.0;
  if (auto p = m.power_exponent()) {
    const double q = *p * power;
    if (m.has_compact_support() && *m.band_edge() < d) {
      // Entire band inside the central bin; average the power over the band.
      const double e = *m.band_edge();
      return std::pow(e, q) / (q + 1.0) * (e / d);
    }
    return std::pow(d, q) / (q + 1.0);
  }
  const auto f = [&](double xi) { return std::pow(m(xi), power); };
  return quad::gl_panel(f, 0.0, d, quad::gauss_legendre(16)) / d;
}

void check_band_resolution(const SpectralDensity& m, double dxi) {
  if (m.has_compact_support() && *m.band_edge() < 2.0 * dxi) {
    throw GridResolutionError(
        "density band edge " + std::to_string(*m.band_edge()) +
        " is narrower than two frequency bins (dxi = " + std::to_string(dxi) +
        "); enlarge the grid or its extent");
  }
}

}  // namespace

Spectrum compute_spectrum(const GridFunction& f, std::size_t pad_factor) {
  if (f.size() == 0) throw InvalidArgumentError("empty grid function");
  if (pad_factor == 0) pad_factor = 1;
  const std::size_t n = fft::next_pow2(f.size() * pad_factor);
  const double h = f.grid.step;

  std::vector<std::complex<double>> data(n, 0.0);
  for (std::size_t j = 0; j < f.size(); ++j) data[j] = f.values[j];
  fft::transform(data, false);

  Spectrum s;
  s.grid = f.grid;
  s.padded_size = n;
  s.dxi = kTwoPi / (static_cast<double>(n) * h);
  s.freq.resize(n);
  s.values.resize(n);
  const double scale = h * kInvSqrtTwoPi;
  for (std::size_t k = 0; k < n; ++k) {
    const double xi = signed_frequency(k, n, s.dxi);
    s.freq[k] = xi;
    // The DFT sums f_j e^{-i xi j h}; restore the grid origin phase.
    const double phase = -xi * f.grid.start;
    s.values[k] = scale * std::polar(1.0, phase) * data[k];
  }
  return s;
}

GridFunction apply_tm(const GridFunction& f, const SpectralDensity& m) {
  Spectrum s = compute_spectrum(f);
  check_band_resolution(m, s.dxi);

  const std::size_t n = s.padded_size;
  std::vector<std::complex<double>> data(n);
  const double h = f.grid.step;
  const double inv_scale = 1.0 / (h * kInvSqrtTwoPi);
  for (std::size_t k = 0; k < n; ++k) {
    const double mult = k == 0 ? central_bin_average(m, s.dxi, 0.5)
                               : std::sqrt(m(std::abs(s.freq[k])));
    // Undo the origin phase so the inverse DFT lands back on the grid.
    data[k] = inv_scale * std::polar(1.0, s.freq[k] * f.grid.start) *
              (mult * s.values[k]);
  }
  fft::transform(data, true);

  double max_im = 0.0;
  double max_re = 0.0;
  GridFunction out(f.grid);
  for (std::size_t j = 0; j < f.size(); ++j) {
    out.values[j] = data[j].real();
    max_re = std::max(max_re, std::abs(data[j].real()));
  }
  for (std::size_t j = 0; j < n; ++j) {
    max_im = std::max(max_im, std::abs(data[j].imag()));
  }
  if (max_im > 1e-10 * std::max(1.0, max_re)) {
    throw Error("apply_tm produced a non-real result (residue " +
                std::to_string(max_im) + "); multiplier symmetry is broken");
  }
  return out;
}

double inner_product_tm(const GridFunction& f, const GridFunction& g,
                        const SpectralDensity& m) {
  if (!(f.grid == g.grid)) {
    throw InvalidArgumentError("inner_product_tm requires a common grid");
  }
  Spectrum sf = compute_spectrum(f);
  Spectrum sg = compute_spectrum(g);
  check_band_resolution(m, sf.dxi);

  const std::size_t n = sf.padded_size;
  const double xi_max = std::numbers::pi / f.grid.step;
  std::complex<double> total = 0.0;
  std::complex<double> upper_half = 0.0;
  double abs_total = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double axi = std::abs(sf.freq[k]);
    const double mbar = k == 0 ? central_bin_average(m, sf.dxi, 1.0) : m(axi);
    if (mbar == 0.0) continue;
    const std::complex<double> term =
        mbar * sf.values[k] * std::conj(sg.values[k]);
    total += term;
    abs_total += std::abs(term);
    if (axi > 0.5 * xi_max) upper_half += term;
  }
  total *= sf.dxi;
  upper_half *= sf.dxi;
  abs_total *= sf.dxi;

  if (std::abs(upper_half) > 1e-3 * std::max(1.0, std::abs(total))) {
    throw DomainViolationError(
        "weighted spectral integral has not converged within the resolved "
        "band (upper-half contribution " +
        std::to_string(std::abs(upper_half)) + " vs total " +
        std::to_string(std::abs(total)) + "); refine the grid step");
  }
  if (std::abs(total.imag()) > 1e-10 * std::max(1.0, std::abs(total.real()))) {
    throw Error("inner_product_tm produced a non-real value (imag " +
                std::to_string(total.imag()) + ")");
  }
  (void)abs_total;
  return total.real();
}

double norm_tm_sq(const GridFunction& f, const SpectralDensity& m) {
  return inner_product_tm(f, f, m);
}

DomainReport domain_check(const GridFunction& f, const SpectralDensity& m) {
  Spectrum s = compute_spectrum(f);
  const std::size_t n = s.padded_size;
  const double xi_max = std::numbers::pi / f.grid.step;

  // Weighted energy in dyadic shells [xi_max/16, /8, /4, /2, 1] * xi_max.
  double shells[5] = {0, 0, 0, 0, 0};
  double total = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double axi = std::abs(s.freq[k]);
    const double mbar = k == 0 ? central_bin_average(m, s.dxi, 1.0) : m(axi);
    const double term = mbar * std::norm(s.values[k]) * s.dxi;
    total += term;
    int shell = 0;
    for (double edge = xi_max / 16.0; shell < 4 && axi > edge; ++shell) {
      edge *= 2.0;
    }
    shells[shell] += term;
  }

  DomainReport report;
  report.weighted_energy = total;
  report.tail_fraction = total > 0.0 ? shells[4] / total : 0.0;
  // In-domain when the weighted energy is concentrated well below the grid
  // Nyquist band and the dyadic contributions are decaying.
  const bool decaying =
      shells[4] <= 0.75 * shells[3] + 1e-12 * std::max(1.0, total) ||
      shells[4] <= 1e-6 * std::max(1.0, total);
  report.in_domain = report.tail_fraction <= 1e-3 && decaying;
  return report;
}

void require_in_domain(const GridFunction& f, const SpectralDensity& m) {
  const DomainReport report = domain_check(f, m);
  if (!report.in_domain) {
    throw DomainViolationError(
        "function is outside the operator domain at this resolution "
        "(top-shell fraction " +
        std::to_string(report.tail_fraction) + " of weighted energy " +
        std::to_string(report.weighted_energy) + ")");
  }
}

}  // namespace spectral_wick
