#pragma once

#include <functional>
#include <span>
#include <vector>

namespace spectral_wick::quad {

using Integrand = std::function<double(double)>;

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1] (Legendre) or (-inf, inf) (Hermite)
  std::vector<double> weights;
};

// Gauss-Legendre nodes/weights by Newton iteration on P_n.  Cached per order.
const GaussRule& gauss_legendre(int order);

// Physicists' Gauss-Hermite rule (weight e^{-x^2}) via the Golub-Welsch
// eigenvalue method.  E[F(mu + sigma Z)] for Z ~ N(0,1) is
//   pi^{-1/2} sum w_i F(mu + sqrt(2) sigma x_i).
const GaussRule& gauss_hermite(int order);

double gl_panel(const Integrand& f, double a, double b, const GaussRule& rule);

// Composite Gauss-Legendre with panel edges supplied by the caller.
double composite(const Integrand& f, std::span<const double> edges,
                 const GaussRule& rule);

// Composite rule on [a, b] with panels no wider than max_width and, when
// osc_freq > 0, no wider than half an oscillation period pi/osc_freq.
double oscillation_aware(const Integrand& f, double a, double b,
                         double osc_freq, double max_width,
                         const GaussRule& rule);

// Integral over (0, upper] of a function with an integrable algebraic
// singularity (or strong grading need) at 0: geometric cells of ratio 1/2
// marching toward the origin.  power_hint is the local exponent p in
// f ~ C |xi|^p near 0 and sets how deep the mesh must go; min_levels is a
// floor on the cell count.  Cells are additionally split so that
// osc_freq * width stays below pi/2.
double graded_toward_zero(const Integrand& f, double upper, int min_levels,
                          double power_hint, double osc_freq,
                          const GaussRule& rule);

// Adaptive Simpson on [a, b].  Throws QuadratureError when the recursion
// budget is exhausted before meeting abs_tol.
double adaptive(const Integrand& f, double a, double b, double abs_tol,
                int max_depth = 40);

// Adaptive Simpson with mandatory split points (sorted, inside [front, back]).
double adaptive_segments(const Integrand& f, std::span<const double> points,
                         double abs_tol, int max_depth = 40);

// Limit of the alternating partial sums via an iterated-averaging table.
// `terms` holds the signed series terms (alternating, decreasing in
// magnitude); returns the accelerated sum.
double alternating_series_limit(std::span<const double> terms);

// Integral over [from, +inf) of envelope(xi) * cos(freq * xi) where envelope
// is smooth, eventually monotone, and -> 0.  Integrates zero-aligned
// half-periods and accelerates the alternating tail.
double cos_tail(const Integrand& envelope, double freq, double from,
                int half_periods = 48);

}  // namespace spectral_wick::quad
