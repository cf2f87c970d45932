#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "spectral_wick/density.hpp"
#include "spectral_wick/grid_function.hpp"

namespace spectral_wick {

// Discrete Fourier data of a grid function, normalized to approximate the
// unitary continuum transform fhat(xi) = (2*pi)^{-1/2} * int e^{-i xi t} f(t) dt.
// Bin k carries xi_k = 2*pi*k' / (N*h) with k' the signed DFT index, so the
// spectrum covers (-pi/h, pi/h] with spacing dxi = 2*pi/(N*h) after padding.
struct Spectrum {
  GridSpec grid;                              // originating grid
  std::size_t padded_size = 0;                // N (power of two)
  double dxi = 0.0;                           // frequency spacing
  std::vector<double> freq;                   // xi_k, natural DFT order
  std::vector<std::complex<double>> values;   // fhat(xi_k)
};

// Zero-pads f to pad_factor * count (rounded to a power of two) and returns
// its continuum-normalized spectrum.
Spectrum compute_spectrum(const GridFunction& f, std::size_t pad_factor = 4);

// T_m f = inverse transform of sqrt(m) * fhat, evaluated back on f's grid.
// The k = 0 multiplier uses the cell average of sqrt(m) over the central bin
// so integrable singularities of m at the origin are handled exactly for
// pure-power densities.  Throws GridResolutionError when a compactly
// supported density's band edge falls under two frequency bins.
GridFunction apply_tm(const GridFunction& f, const SpectralDensity& m);

// (T_m f, T_m g) = int m(xi) fhat(xi) conj(ghat(xi)) dxi, approximated by the
// midpoint sum dxi * sum_k mbar(xi_k) fhat_k conj(ghat_k) over the padded
// circle.  Throws DomainViolationError when the upper half of the resolved
// band still contributes more than 0.1% of the total (the integral is then
// not trustworthy at this resolution), and InvalidArgumentError on grid
// mismatch.
double inner_product_tm(const GridFunction& f, const GridFunction& g,
                        const SpectralDensity& m);

double norm_tm_sq(const GridFunction& f, const SpectralDensity& m);

struct DomainReport {
  bool in_domain = false;
  // Fraction of int m |fhat|^2 carried by the top half of the resolved band.
  double tail_fraction = 0.0;
  double weighted_energy = 0.0;  // the partial integral over the full band
};

// Diagnoses whether f lies in the natural domain of T_m by watching the
// growth of the weighted spectral energy across dyadic frequency shells.
DomainReport domain_check(const GridFunction& f, const SpectralDensity& m);

// Convenience: throws DomainViolationError when domain_check fails.
void require_in_domain(const GridFunction& f, const SpectralDensity& m);

}  // namespace spectral_wick
