#include "spectral_wick/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "spectral_wick/errors.hpp"
#include "spectral_wick/parallel.hpp"
#include "spectral_wick/quadrature.hpp"
#include "spectral_wick/rng.hpp"

namespace spectral_wick {

namespace {

constexpr std::size_t kMaxSpectralBins = 1u << 21;

Eigen::MatrixXd spectral_basis(const KernelEvaluator& kernel,
                               std::span<const double> times) {
  const SpectralDensity& m = kernel.density();
  double t_max = 0.0;
  for (double t : times) t_max = std::max(t_max, std::abs(t));
  if (t_max == 0.0) t_max = 1.0;

  const double dxi = std::numbers::pi / (32.0 * t_max);
  const double r_target = kernel.variance_r(t_max);
  const double var_tol = 0.005 * std::max(r_target, 1e-12);

  // Bin k covers [(k-1) dxi, k dxi].  Each bin carries its exact density
  // mass (closed form for pure powers, clipped to the band for compact
  // support, panel quadrature otherwise) rather than the midpoint value
  // m(xi_k) dxi: with a singular density the midpoint misses a fixed
  // fraction of the first bin's mass no matter how high the frequency
  // ceiling grows, and the variance match below would never converge.
  const auto bin_mass = [&](std::size_t k) -> double {
    double lo = static_cast<double>(k - 1) * dxi;
    double hi = static_cast<double>(k) * dxi;
    if (m.has_compact_support()) {
      hi = std::min(hi, *m.band_edge());
      if (hi <= lo) return 0.0;
    }
    if (const auto p = m.power_exponent()) {
      return (std::pow(hi, *p + 1.0) - std::pow(lo, *p + 1.0)) / (*p + 1.0);
    }
    return quad::gl_panel([&](double xi) { return m(xi); }, lo, hi,
                          quad::gauss_legendre(8));
  };

  std::vector<double> masses;
  const auto extend_masses = [&](std::size_t count) {
    masses.reserve(count);
    while (masses.size() < count) masses.push_back(bin_mass(masses.size() + 1));
  };
  // Variance carried by bin k at the horizon (fixed ascending summation
  // order keeps results independent of the thread count).
  const auto variance_term = [&](std::size_t k) {
    const double xi = (static_cast<double>(k) - 0.5) * dxi;
    return masses[k - 1] / std::numbers::pi * (2.0 - 2.0 * std::cos(xi * t_max)) /
           (xi * xi);
  };

  // Grow the frequency ceiling until the represented variance at t_max
  // matches r(t_max) to 0.5%.
  std::size_t bins = 256;
  if (m.has_compact_support()) {
    bins = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(*m.band_edge() / dxi)));
  }
  if (bins > kMaxSpectralBins) {
    throw QuadratureError(
        "spectral sampling would need too many frequency bins; use the "
        "Cholesky method instead");
  }
  extend_masses(bins);
  double acc = 0.0;
  for (std::size_t k = 1; k <= bins; ++k) acc += variance_term(k);
  while (!m.has_compact_support() && bins < kMaxSpectralBins &&
         std::abs(acc - r_target) > var_tol) {
    extend_masses(2 * bins);
    for (std::size_t k = bins + 1; k <= 2 * bins; ++k) acc += variance_term(k);
    bins *= 2;
  }
  if (std::abs(acc - r_target) > var_tol) {
    throw QuadratureError(
        "spectral sampling could not match the target variance to 0.5%; "
        "use the Cholesky method instead");
  }

  Eigen::MatrixXd basis(times.size(), 2 * bins);
  for (std::size_t k = 0; k < bins; ++k) {
    const double xi = (static_cast<double>(k) + 0.5) * dxi;
    const double a = std::sqrt(masses[k] / std::numbers::pi) / xi;
    for (std::size_t j = 0; j < times.size(); ++j) {
      basis(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(2 * k)) =
          a * std::sin(xi * times[j]);
      basis(static_cast<Eigen::Index>(j),
            static_cast<Eigen::Index>(2 * k + 1)) =
          a * (1.0 - std::cos(xi * times[j]));
    }
  }
  return basis;
}

}  // namespace

PathEnsemble sample_paths(const KernelEvaluator& kernel,
                          std::span<const double> times, std::size_t n_paths,
                          std::uint64_t seed, SampleMethod method) {
  if (times.empty()) throw InvalidArgumentError("sample_paths: no times");
  if (n_paths < 2) {
    throw InvalidArgumentError("sample_paths: need at least two paths");
  }

  PathEnsemble out;
  out.times.assign(times.begin(), times.end());
  out.seed = seed;
  out.method = method;
  out.paths.resize(static_cast<Eigen::Index>(n_paths),
                   static_cast<Eigen::Index>(times.size()));

  // Path i draws from stream i, independent of the thread partition.
  if (method == SampleMethod::kCholesky) {
    const Eigen::MatrixXd gram = kernel.gram(times);
    const Eigen::MatrixXd lower = cholesky_with_jitter(gram).lower;
    parallel_for(n_paths, [&](std::size_t lo, std::size_t hi) {
      Eigen::VectorXd z(static_cast<Eigen::Index>(times.size()));
      for (std::size_t i = lo; i < hi; ++i) {
        fill_normals(seed, i, std::span<double>(z.data(), times.size()));
        out.paths.row(static_cast<Eigen::Index>(i)) =
            (lower * z).transpose();
      }
    });
  } else {
    const Eigen::MatrixXd basis = spectral_basis(kernel, times);
    const std::size_t dim = static_cast<std::size_t>(basis.cols());
    parallel_for(n_paths, [&](std::size_t lo, std::size_t hi) {
      Eigen::VectorXd z(static_cast<Eigen::Index>(dim));
      for (std::size_t i = lo; i < hi; ++i) {
        fill_normals(seed, i, std::span<double>(z.data(), dim));
        out.paths.row(static_cast<Eigen::Index>(i)) = (basis * z).transpose();
      }
    });
  }
  return out;
}

CovarianceCheck covariance_check(const PathEnsemble& ensemble,
                                 const KernelEvaluator& kernel) {
  const std::size_t n = ensemble.n_paths();
  const std::size_t k = ensemble.times.size();
  if (n < 4) throw InvalidArgumentError("covariance_check: too few paths");

  CovarianceCheck out;
  out.target = kernel.gram(ensemble.times);
  out.empirical.resize(static_cast<Eigen::Index>(k),
                       static_cast<Eigen::Index>(k));
  out.std_error.resize(static_cast<Eigen::Index>(k),
                       static_cast<Eigen::Index>(k));

  // Column means, pairwise-summed for thread-count invariance.
  std::vector<double> mean(k);
  std::vector<double> column(n);
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t i = 0; i < n; ++i) {
      column[i] = ensemble.paths(static_cast<Eigen::Index>(i),
                                 static_cast<Eigen::Index>(a));
    }
    mean[a] = pairwise_sum(column.data(), n) / static_cast<double>(n);
  }

  const double dn = static_cast<double>(n);
  std::vector<double> u(n), usq(n);
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b <= a; ++b) {
      for (std::size_t i = 0; i < n; ++i) {
        const auto ia = static_cast<Eigen::Index>(i);
        u[i] = (ensemble.paths(ia, static_cast<Eigen::Index>(a)) - mean[a]) *
               (ensemble.paths(ia, static_cast<Eigen::Index>(b)) - mean[b]);
      }
      const double q = pairwise_sum(u.data(), n);
      const double ubar = q / dn;
      for (std::size_t i = 0; i < n; ++i) {
        const double d = u[i] - ubar;
        usq[i] = d * d;
      }
      const double spread = pairwise_sum(usq.data(), n);
      // Leave-one-out covariance C_{-i} = (q - n/(n-1) u_i) / (n-2) is affine
      // in u_i, so the jackknife variance collapses to a closed form.
      const double beta = dn / ((dn - 1.0) * (dn - 2.0));
      const double se = beta * std::sqrt((dn - 1.0) / dn * spread);
      const double est = q / (dn - 1.0);
      const auto A = static_cast<Eigen::Index>(a);
      const auto B = static_cast<Eigen::Index>(b);
      out.empirical(A, B) = est;
      out.empirical(B, A) = est;
      out.std_error(A, B) = se;
      out.std_error(B, A) = se;
    }
  }

  out.max_abs_error = (out.empirical - out.target).cwiseAbs().maxCoeff();
  double max_z = 0.0;
  for (Eigen::Index a = 0; a < out.target.rows(); ++a) {
    for (Eigen::Index b = 0; b < out.target.cols(); ++b) {
      const double se = std::max(out.std_error(a, b), 1e-300);
      max_z = std::max(max_z,
                       std::abs(out.empirical(a, b) - out.target(a, b)) / se);
    }
  }
  out.max_z = max_z;
  return out;
}

GirsanovReport girsanov_check(const SmCalculus& calculus,
                              const MaskedDirection& f,
                              std::span<const double> times,
                              std::size_t n_paths, std::uint64_t seed) {
  if (times.empty()) throw InvalidArgumentError("girsanov_check: no times");
  if (n_paths < 16) {
    throw InvalidArgumentError("girsanov_check: too few paths");
  }
  const std::size_t k = times.size();

  const MaskedDirection dirs[] = {f};
  const Eigen::MatrixXd gram = calculus.joint_gram(times, std::span(dirs, 1));
  const Eigen::MatrixXd lower = cholesky_with_jitter(gram).lower;

  GirsanovReport out;
  out.times.assign(times.begin(), times.end());
  out.n_paths = n_paths;
  out.norm_sq_f = gram(static_cast<Eigen::Index>(k),
                       static_cast<Eigen::Index>(k));
  out.expected_shift.resize(k);
  for (std::size_t j = 0; j < k; ++j) {
    out.expected_shift[j] = gram(static_cast<Eigen::Index>(j),
                                 static_cast<Eigen::Index>(k));
  }

  Eigen::MatrixXd samples(static_cast<Eigen::Index>(n_paths),
                          static_cast<Eigen::Index>(k + 1));
  parallel_for(n_paths, [&](std::size_t lo, std::size_t hi) {
    Eigen::VectorXd z(static_cast<Eigen::Index>(k + 1));
    for (std::size_t i = lo; i < hi; ++i) {
      fill_normals(seed, i, std::span<double>(z.data(), k + 1));
      samples.row(static_cast<Eigen::Index>(i)) = (lower * z).transpose();
    }
  });

  const double half_norm = 0.5 * out.norm_sq_f;
  std::vector<double> w(n_paths);
  for (std::size_t i = 0; i < n_paths; ++i) {
    w[i] = std::exp(samples(static_cast<Eigen::Index>(i),
                            static_cast<Eigen::Index>(k)) -
                    half_norm);
  }
  const double sum_w = pairwise_sum(w.data(), n_paths);
  std::vector<double> wsq(n_paths);
  for (std::size_t i = 0; i < n_paths; ++i) wsq[i] = w[i] * w[i];
  const double sum_w2 = pairwise_sum(wsq.data(), n_paths);
  out.ess = sum_w * sum_w / sum_w2;
  out.low_ess = out.ess < static_cast<double>(n_paths) / 10.0;

  out.weighted_mean.resize(k);
  out.std_error.resize(k);
  std::vector<double> wx(n_paths), jack(n_paths);
  const double dn = static_cast<double>(n_paths);
  double max_z = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t i = 0; i < n_paths; ++i) {
      wx[i] = w[i] * samples(static_cast<Eigen::Index>(i),
                             static_cast<Eigen::Index>(j));
    }
    const double sum_wx = pairwise_sum(wx.data(), n_paths);
    const double ratio = sum_wx / sum_w;
    out.weighted_mean[j] = ratio;

    // Leave-one-out ratio estimates in O(1) each.
    for (std::size_t i = 0; i < n_paths; ++i) {
      jack[i] = (sum_wx - wx[i]) / (sum_w - w[i]);
    }
    const double jbar = pairwise_sum(jack.data(), n_paths) / dn;
    for (std::size_t i = 0; i < n_paths; ++i) {
      const double d = jack[i] - jbar;
      jack[i] = d * d;
    }
    const double var_jk =
        (dn - 1.0) / dn * pairwise_sum(jack.data(), n_paths);
    out.std_error[j] = std::sqrt(var_jk);
    const double se = std::max(out.std_error[j], 1e-300);
    max_z =
        std::max(max_z, std::abs(ratio - out.expected_shift[j]) / se);
  }
  out.max_z = max_z;

  // Mean weight: E[w] = 1 under the base measure (plain mean, sample stderr).
  out.weight_mean = sum_w / dn;
  {
    std::vector<double> dev(n_paths);
    for (std::size_t i = 0; i < n_paths; ++i) {
      const double d = w[i] - out.weight_mean;
      dev[i] = d * d;
    }
    const double var = pairwise_sum(dev.data(), n_paths) / (dn - 1.0);
    out.weight_std_error = std::sqrt(var / dn);
    out.weight_z = std::abs(out.weight_mean - 1.0) /
                   std::max(out.weight_std_error, 1e-300);
  }

  // Weighted covariance of the shifted process: under the tilted measure the
  // shifted paths are centered with the original kernel covariance, so the
  // self-normalized weighted second moment must match gram's time block.
  const auto ik = [](std::size_t i) { return static_cast<Eigen::Index>(i); };
  out.cov_target = gram.topLeftCorner(ik(k), ik(k));
  out.cov_weighted.resize(ik(k), ik(k));
  out.cov_std_error.resize(ik(k), ik(k));
  std::vector<double> wu(n_paths);
  std::size_t within = 0;
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a; b < k; ++b) {
      for (std::size_t i = 0; i < n_paths; ++i) {
        const double xa = samples(ik(i), ik(a)) - out.expected_shift[a];
        const double xb = samples(ik(i), ik(b)) - out.expected_shift[b];
        wu[i] = w[i] * xa * xb;
      }
      const double sum_wu = pairwise_sum(wu.data(), n_paths);
      const double ratio = sum_wu / sum_w;
      for (std::size_t i = 0; i < n_paths; ++i) {
        jack[i] = (sum_wu - wu[i]) / (sum_w - w[i]);
      }
      const double jbar = pairwise_sum(jack.data(), n_paths) / dn;
      for (std::size_t i = 0; i < n_paths; ++i) {
        const double d = jack[i] - jbar;
        jack[i] = d * d;
      }
      const double var_jk =
          (dn - 1.0) / dn * pairwise_sum(jack.data(), n_paths);
      const double se = std::sqrt(var_jk);
      out.cov_weighted(ik(a), ik(b)) = ratio;
      out.cov_weighted(ik(b), ik(a)) = ratio;
      out.cov_std_error(ik(a), ik(b)) = se;
      out.cov_std_error(ik(b), ik(a)) = se;
      if (std::abs(ratio - out.cov_target(ik(a), ik(b))) <=
          3.0 * std::max(se, 1e-300)) {
        ++within;
      }
    }
  }
  out.cov_within_3se =
      static_cast<double>(within) / (static_cast<double>(k * (k + 1)) / 2.0);
  return out;
}

}  // namespace spectral_wick
