// Acceptance harness: one check per shipping criterion, each printing a
// single [PASS]/[FAIL] line with the measured margin.  Tolerances are pinned
// here, not read from configuration, so a regression cannot silently loosen
// them.  Exit status is nonzero when any criterion fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <boost/multiprecision/cpp_int.hpp>

#include "spectral_wick/density.hpp"
#include "spectral_wick/ito.hpp"
#include "spectral_wick/kernel.hpp"
#include "spectral_wick/quadrature.hpp"
#include "spectral_wick/s_transform.hpp"
#include "spectral_wick/sampling.hpp"
#include "spectral_wick/verify.hpp"
#include "spectral_wick/wick.hpp"

namespace sw = spectral_wick;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int g_failures = 0;

std::string format_seconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f s", s);
  return buf;
}

void run_criterion(int id, const std::string& label,
                   const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out.pass = false;
    out.detail = std::string("exception: ") + e.what();
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  std::printf("[%s] %2d. %-28s %s (%s)\n", out.pass ? "PASS" : "FAIL", id,
              label.c_str(), out.detail.c_str(),
              format_seconds(seconds).c_str());
  std::fflush(stdout);
  if (!out.pass) ++g_failures;
}

std::vector<double> open_grid(double t_max, int points) {
  std::vector<double> t(points);
  for (int j = 0; j < points; ++j) {
    t[j] = t_max * static_cast<double>(j + 1) / points;
  }
  return t;
}

std::string read_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// ---- 1. white-noise reduction --------------------------------------------

Outcome white_noise_reduction() {
  const sw::KernelEvaluator kernel(sw::SpectralDensity::white());
  const auto t = open_grid(3.0, 16);
  double worst = 0.0;
  for (double ti : t) {
    for (double sj : t) {
      worst = std::max(worst,
                       std::abs(kernel.covariance(ti, sj) - std::min(ti, sj)));
    }
  }
  const bool pass = worst < 1e-6;
  return {pass, "max |K - min(t,s)| = " + std::to_string(worst)};
}

// ---- 2. fractional covariance shape + amplitude oracle --------------------

// Independent oracle: direct quadrature of the normalizing amplitude
//   c_H = (2/pi) int_0^inf (1 - cos u) u^{-1-2H} du,
// using only the raw quadrature primitives (no kernel machinery).
double amplitude_oracle(double hurst) {
  const double power = 1.0 - 2.0 * hurst;  // integrand ~ u^{1-2H}/2 near 0
  const auto g = [hurst](double u) {
    const double s = std::sin(0.5 * u);
    return 2.0 * s * s * std::pow(u, -1.0 - 2.0 * hurst);
  };
  const auto& rule = sw::quad::gauss_legendre(16);
  const double pi = std::numbers::pi;
  double acc = sw::quad::graded_toward_zero(g, pi, 60, power, 0.0, rule);
  // 1 part of (1 - cos): closed form over [pi, inf); cos part alternates.
  acc += std::pow(pi, -2.0 * hurst) / (2.0 * hurst);
  const auto envelope = [hurst](double u) {
    return std::pow(u, -1.0 - 2.0 * hurst);
  };
  acc -= sw::quad::cos_tail(envelope, 1.0, pi);
  return 2.0 / pi * acc;
}

Outcome fractional_shape() {
  double worst_spread = 0.0;
  double worst_amp = 0.0;
  for (const double hurst : {0.6, 0.75}) {
    const sw::KernelEvaluator kernel(sw::SpectralDensity::fractional(hurst));
    const auto t = open_grid(3.0, 10);
    std::vector<double> ratios;
    for (double ti : t) {
      for (double sj : t) {
        const double shape = std::pow(ti, 2 * hurst) +
                             std::pow(sj, 2 * hurst) -
                             std::pow(std::abs(ti - sj), 2 * hurst);
        ratios.push_back(kernel.covariance(ti, sj) / shape);
      }
    }
    double mean = 0.0;
    for (double r : ratios) mean += r;
    mean /= static_cast<double>(ratios.size());
    for (double r : ratios) {
      worst_spread = std::max(worst_spread, std::abs(r - mean) / mean);
    }
    const double oracle = amplitude_oracle(hurst);
    worst_amp = std::max(worst_amp, std::abs(2.0 * mean - oracle) / oracle);
  }
  const bool pass = worst_spread < 1e-3 && worst_amp < 1e-3;
  char buf[96];
  std::snprintf(buf, sizeof(buf), "ratio spread %.2e, amplitude dev %.2e",
                worst_spread, worst_amp);
  return {pass, buf};
}

// ---- 3. Gram factorization without meaningful jitter -----------------------

Outcome gram_psd() {
  const std::array<sw::SpectralDensity, 4> densities = {
      sw::SpectralDensity::white(), sw::SpectralDensity::band_limited(1.0),
      sw::SpectralDensity::fractional(0.75),
      sw::SpectralDensity::band_limited_fractional(0.7, 4.0)};
  const auto t = open_grid(4.0, 64);
  double worst_ratio = 0.0;
  for (const auto& m : densities) {
    const Eigen::MatrixXd gram = sw::gram_matrix(m, t);
    const auto factor = sw::cholesky_with_jitter(gram);
    const double max_diag = gram.diagonal().maxCoeff();
    worst_ratio = std::max(worst_ratio, factor.jitter / max_diag);
  }
  const bool pass = worst_ratio <= 1e-10;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "max jitter/diag = %.2e", worst_ratio);
  return {pass, buf};
}

// ---- 4. sampling fidelity ---------------------------------------------------

double within_3se_fraction(const Eigen::MatrixXd& diff,
                           const Eigen::MatrixXd& se) {
  int total = 0;
  int ok = 0;
  for (int i = 0; i < diff.rows(); ++i) {
    for (int j = i; j < diff.cols(); ++j) {
      ++total;
      if (std::abs(diff(i, j)) <= 3.0 * se(i, j)) ++ok;
    }
  }
  return static_cast<double>(ok) / total;
}

Outcome sampling_fidelity() {
  const auto start = std::chrono::steady_clock::now();
  const sw::KernelEvaluator kernel(sw::SpectralDensity::white());
  const auto t = open_grid(2.0, 8);
  const std::size_t n = 20000;
  const auto chol =
      sw::sample_paths(kernel, t, n, 17, sw::SampleMethod::kCholesky);
  const auto spec =
      sw::sample_paths(kernel, t, n, 17, sw::SampleMethod::kSpectral);
  const auto check_c = sw::covariance_check(chol, kernel);
  const auto check_s = sw::covariance_check(spec, kernel);
  const double frac_c =
      within_3se_fraction(check_c.empirical - check_c.target,
                          check_c.std_error);
  const double frac_s =
      within_3se_fraction(check_s.empirical - check_s.target,
                          check_s.std_error);
  const Eigen::MatrixXd cross_se =
      (check_c.std_error.array().square() + check_s.std_error.array().square())
          .sqrt()
          .matrix();
  const double frac_x =
      within_3se_fraction(check_c.empirical - check_s.empirical, cross_se);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  const bool pass =
      frac_c >= 0.95 && frac_s >= 0.95 && frac_x >= 0.95 && seconds < 60.0;
  char buf[128];
  std::snprintf(buf, sizeof(buf),
                "within-3se fractions: gram %.3f spectral %.3f cross %.3f",
                frac_c, frac_s, frac_x);
  return {pass, buf};
}

// ---- 5. transform-level identity suite -------------------------------------

Outcome identity_suite() {
  double worst = 0.0;
  bool pass = true;
  std::string failing;
  const std::array<sw::SpectralDensity, 3> densities = {
      sw::SpectralDensity::white(), sw::SpectralDensity::band_limited(1.0),
      sw::SpectralDensity::fractional(0.7)};
  for (const auto& m : densities) {
    const auto report = sw::verify_identities(m, sw::KernelConfig{});
    for (const auto& identity : report.identities) {
      if (identity.require_above) {
        if (!identity.pass) {
          pass = false;
          failing = report.density_name + "/" + identity.identity;
        }
        continue;
      }
      worst = std::max(worst, identity.max_error);
      if (!identity.pass || identity.max_error >= 1e-6) {
        pass = false;
        failing = report.density_name + "/" + identity.identity;
      }
    }
  }
  char buf[128];
  if (pass) {
    std::snprintf(buf, sizeof(buf), "max probe error %.2e over 3 densities",
                  worst);
  } else {
    std::snprintf(buf, sizeof(buf), "failing identity: %s", failing.c_str());
  }
  return {pass, buf};
}

// ---- 6 & 7. transform route agreement + squared-monomial correction --------

std::optional<sw::IdentitySuiteReport> g_route_report;

Outcome route_agreement() {
  sw::IdentitySuiteOptions opts;
  opts.mc_samples = 100000;
  opts.seed = 2026;
  g_route_report =
      sw::verify_identities(sw::SpectralDensity::white(), sw::KernelConfig{},
                            opts);
  double worst_dev = 0.0;
  double worst_z = 0.0;
  for (const auto& route : g_route_report->routes) {
    worst_dev = std::max(worst_dev, route.closed_vs_quadrature);
    if (route.mc_ran) worst_z = std::max(worst_z, route.mc_z);
  }
  const bool pass = worst_dev < 1e-8 && worst_z < 4.0;
  char buf[96];
  std::snprintf(buf, sizeof(buf), "closed-vs-quadrature %.2e, worst MC z %.2f",
                worst_dev, worst_z);
  return {pass, buf};
}

Outcome squared_monomial() {
  if (!g_route_report.has_value()) {
    return {false, "route report unavailable"};
  }
  double worst = -1.0;
  for (const auto& route : g_route_report->routes) {
    const bool relevant = route.functional == "monomial_x2" ||
                          route.functional.rfind("reconstruction_x", 0) == 0;
    if (relevant) worst = std::max(worst, route.closed_vs_quadrature);
  }
  const bool pass = worst >= 0.0 && worst < 1e-8;
  char buf[96];
  std::snprintf(buf, sizeof(buf),
                "x^2 and reconstruction deviations <= %.2e", worst);
  return {pass, buf};
}

// ---- 8. change-of-variable formula ------------------------------------------

Outcome ito_formula() {
  const auto start = std::chrono::steady_clock::now();
  const sw::SmCalculus calc(sw::SpectralDensity::white());
  const sw::MaskedDirection window{sw::ConstantDirection{1.0}, 0.0, 1.0};
  const auto probes = sw::standard_probe_specs();
  sw::ItoOptions opts;
  opts.mc_paths = 100000;
  opts.seed = 77;

  const sw::FRecord square{[](double x) { return x * x; },
                           [](double x) { return 2.0 * x; },
                           [](double) { return 2.0; }, "x_squared"};
  const auto square_report = sw::ito_check(calc, square, window, probes, opts);

  const sw::FRecord cosine{[](double x) { return std::cos(x); },
                           [](double x) { return -std::sin(x); },
                           [](double x) { return -std::cos(x); }, "cosine"};
  const auto cos_report = sw::ito_check(calc, cosine, window, probes, opts);

  const double v_tau =
      calc.norm_sq_masked(sw::MaskedDirection{sw::ConstantDirection{1.0}, 0.0,
                                              1.0});
  const double analytic = std::exp(-0.5 * v_tau) - 1.0;
  const auto& zero_probe = cos_report.probe_results.front();
  const double lhs_dev = std::abs(zero_probe.lhs - analytic);
  const double quad_dev =
      std::abs(zero_probe.db_term + zero_probe.dt_term - analytic);

  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  const bool pass = square_report.max_abs_error < 1e-5 && lhs_dev < 1e-6 &&
                    quad_dev < 1e-6 && cos_report.mc_z < 4.0 &&
                    square_report.mc_z < 4.0 && seconds < 120.0;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "x^2 err %.2e; cos analytic dev %.2e/%.2e; MC z %.2f/%.2f",
                square_report.max_abs_error, lhs_dev, quad_dev,
                square_report.mc_z, cos_report.mc_z);
  return {pass, buf};
}

// ---- 9. measure change -------------------------------------------------------

Outcome measure_change() {
  bool pass = true;
  std::string detail;
  for (const auto& m : {sw::SpectralDensity::white(),
                        sw::SpectralDensity::fractional(0.7)}) {
    const sw::SmCalculus calc(m);
    const sw::MaskedDirection f{sw::IndicatorDirection{0.0, 1.0}, 0.0, 1.0};
    const auto times = open_grid(2.0, 8);
    const auto report = sw::girsanov_check(calc, f, times, 20000, 31);
    const bool ok = report.max_z <= 5.0 && report.cov_within_3se >= 0.95 &&
                    report.weight_z <= 5.0;
    pass = pass && ok;
    char buf[96];
    std::snprintf(buf, sizeof(buf), "[%s z %.2f cov %.2f wz %.2f] ",
                  m.name().c_str(), report.max_z, report.cov_within_3se,
                  report.weight_z);
    detail += buf;
  }
  return {pass, detail};
}

// ---- 10. exact Wick algebra ---------------------------------------------------

boost::multiprecision::cpp_int factorial(int n) {
  boost::multiprecision::cpp_int acc = 1;
  for (int k = 2; k <= n; ++k) acc *= k;
  return acc;
}

sw::Rational rational_pow(const sw::Rational& base, int exp) {
  sw::Rational acc = 1;
  for (int k = 0; k < exp; ++k) acc *= base;
  return acc;
}

sw::Rational hermite_recurrence_exact(int n, const sw::Rational& x,
                                      const sw::Rational& v) {
  sw::Rational prev = 0;
  sw::Rational cur = 1;
  for (int k = 0; k < n; ++k) {
    const sw::Rational next = x * cur - sw::Rational(k) * v * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

sw::Rational hermite_explicit_exact(int n, const sw::Rational& x,
                                    const sw::Rational& v) {
  sw::Rational acc = 0;
  for (int m = 0; 2 * m <= n; ++m) {
    const sw::Rational combinatorial(factorial(n),
                                     factorial(m) * factorial(n - 2 * m));
    acc += combinatorial * rational_pow(-v / 2, m) * rational_pow(x, n - 2 * m);
  }
  return acc;
}

Outcome wick_exactness() {
  const sw::Rational x(5, 3);
  const sw::Rational v(3, 7);

  // Index additivity of the Wick product on the basis, n + k <= 20.
  for (int n = 0; n <= 20; ++n) {
    for (int k = 0; n + k <= 20; ++k) {
      sw::WickPolynomial a;
      a.coeffs.assign(n + 1, 0);
      a.coeffs[n] = 1;
      sw::WickPolynomial b;
      b.coeffs.assign(k + 1, 0);
      b.coeffs[k] = 1;
      const auto product = sw::wick_product(a, b);
      if (product.degree() != n + k) {
        return {false, "basis product degree mismatch"};
      }
      for (int j = 0; j <= product.degree(); ++j) {
        const sw::Rational expected = (j == n + k) ? 1 : 0;
        if (product.coeffs[j] != expected) {
          return {false, "basis product coefficient mismatch"};
        }
      }
    }
  }

  // Bilinearity spot check: (p_1 + p_2) <> p_2 = p_3 + p_4.
  {
    sw::WickPolynomial a;
    a.coeffs = {0, 1, 1};
    sw::WickPolynomial b;
    b.coeffs = {0, 0, 1};
    const auto product = sw::wick_product(a, b);
    const std::vector<sw::Rational> expected = {0, 0, 0, 1, 1};
    if (product.coeffs != expected) return {false, "bilinearity mismatch"};
  }

  // Recurrence equals the explicit combinatorial sum, exactly, n <= 20.
  for (int n = 0; n <= 20; ++n) {
    if (hermite_recurrence_exact(n, x, v) != hermite_explicit_exact(n, x, v)) {
      return {false, "recurrence vs explicit sum mismatch at n = " +
                         std::to_string(n)};
    }
    // Degenerate variance collapses the Wick power to the plain monomial.
    if (hermite_recurrence_exact(n, x, 0) != rational_pow(x, n)) {
      return {false, "zero-variance monomial mismatch at n = " +
                         std::to_string(n)};
    }
  }

  // The library's monomial expansion agrees with the exact recurrence:
  // x^n = sum_j c_j v^{(n-j)/2} p_j(x; v) evaluated in rationals.
  for (int n = 0; n <= 8; ++n) {
    const auto coeffs = sw::monomial_in_hermite(n);
    sw::Rational acc = 0;
    for (int j = n; j >= 0; j -= 2) {
      acc += coeffs[j] * rational_pow(v, (n - j) / 2) *
             hermite_recurrence_exact(j, x, v);
    }
    if (acc != rational_pow(x, n)) {
      return {false, "monomial expansion mismatch at n = " +
                         std::to_string(n)};
    }
  }

  return {true, "all products, recurrences, and expansions exact"};
}

// ---- 11. thread-count determinism --------------------------------------------

#ifndef SPECTRAL_WICK_CLI_PATH
#define SPECTRAL_WICK_CLI_PATH ""
#endif

Outcome determinism() {
  const std::string cli = SPECTRAL_WICK_CLI_PATH;
  if (cli.empty() || !std::filesystem::exists(cli)) {
    return {false, "command-line binary not found"};
  }
  namespace fs = std::filesystem;
  const fs::path base =
      fs::temp_directory_path() /
      ("spectral_wick_determinism_" + std::to_string(::getpid()));
  fs::remove_all(base);
  fs::create_directories(base);
  const fs::path config_path = base / "run.toml";
  const fs::path out_dir = base / "out";
  {
    std::ofstream cfg(config_path);
    cfg << "density = \"fractional:0.7\"\n\n[grid]\nt_max = 2.0\npoints = 6\n"
        << "\n[mc]\nn = 4000\nseed = 2024\nmethod = \"both\"\n";
  }

  const std::vector<std::string> files = {"verify_identities.json",
                                          "sample.json",
                                          "samples_cholesky.csv",
                                          "samples_spectral.csv"};
  // Three runs: threads=1, threads=8, threads=1 again.
  std::array<std::vector<std::string>, 3> captured;
  const std::array<int, 3> threads = {1, 8, 1};
  for (int run = 0; run < 3; ++run) {
    fs::remove_all(out_dir);
    fs::create_directories(out_dir);
    for (const char* sub : {"verify-identities", "sample"}) {
      const std::string command =
          "SPECTRAL_WICK_THREADS=" + std::to_string(threads[run]) + " '" +
          cli + "' " + sub + " --config '" + config_path.string() +
          "' --out '" + out_dir.string() + "' > /dev/null 2>&1";
      if (std::system(command.c_str()) != 0) {
        return {false, std::string("subcommand failed: ") + sub};
      }
    }
    for (const auto& name : files) {
      captured[run].push_back(read_bytes(out_dir / name));
    }
  }
  for (std::size_t f = 0; f < files.size(); ++f) {
    if (captured[0][f].empty()) {
      return {false, files[f] + " missing or empty"};
    }
    if (captured[0][f] != captured[1][f] || captured[0][f] != captured[2][f]) {
      return {false, files[f] + " differs across thread counts"};
    }
  }
  fs::remove_all(base);
  std::size_t total = 0;
  for (const auto& bytes : captured[0]) total += bytes.size();
  return {true, std::to_string(total) + " bytes byte-identical across runs"};
}

}  // namespace

int main() {
  run_criterion(1, "white-noise reduction", white_noise_reduction);
  run_criterion(2, "fractional kernel shape", fractional_shape);
  run_criterion(3, "gram factorization", gram_psd);
  run_criterion(4, "sampling fidelity", sampling_fidelity);
  run_criterion(5, "identity suite", identity_suite);
  run_criterion(6, "transform route agreement", route_agreement);
  run_criterion(7, "squared-monomial correction", squared_monomial);
  run_criterion(8, "change-of-variable formula", ito_formula);
  run_criterion(9, "measure change", measure_change);
  run_criterion(10, "exact Wick algebra", wick_exactness);
  run_criterion(11, "thread-count determinism", determinism);

  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
