// Command-line front end: config parsing, subcommand dispatch, CSV/JSON
// emission.  Exit codes: 0 all checks passed, 1 a declared tolerance failed,
// 2 configuration problem, 3 internal error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "spectral_wick/errors.hpp"
#include "spectral_wick/ito.hpp"
#include "spectral_wick/kernel.hpp"
#include "spectral_wick/run_config.hpp"
#include "spectral_wick/sampling.hpp"
#include "spectral_wick/s_transform.hpp"
#include "spectral_wick/verify.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using namespace spectral_wick;

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open output file " + path.string());
  out << content;
}

json config_block(const RunConfig& cfg) { return json::parse(config_json(cfg)); }

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json probe_to_json(const ProbeSpec& ps) {
  return {{"center", ps.center}, {"width", ps.width}, {"amp", ps.amp}};
}

std::uint64_t require_seed(const RunConfig& cfg) {
  if (!cfg.mc.seed.has_value()) {
    throw ConfigError("mc.seed",
                      "a seed is required for Monte Carlo subcommands "
                      "(set it in [mc] or pass --seed)");
  }
  return *cfg.mc.seed;
}

// The time window a direction is paired with when used as a Girsanov or
// Ito weight: indicators bound their own support, everything else uses the
// grid horizon.
MaskedDirection window_for(const Direction& d, double fallback_hi) {
  if (const auto* ind = std::get_if<IndicatorDirection>(&d)) {
    return MaskedDirection{d, ind->a, ind->b};
  }
  return MaskedDirection{d, 0.0, fallback_hi};
}

int run_kernel(const RunConfig& cfg, const fs::path& out_dir) {
  const SpectralDensity m = make_density(cfg.density);
  const KernelEvaluator kernel(m, cfg.kernel);
  const std::vector<double> times = cfg.grid_times();

  std::ostringstream csv;
  const std::vector<std::string> header = {"t", "s", "covariance", "r_t"};
  CsvWriter writer(csv, header);
  for (const double t : times) {
    const double rt = kernel.variance_r(t);
    for (const double s : times) {
      const double row[] = {t, s, kernel.covariance(t, s), rt};
      writer.row(row);
    }
  }
  write_file(out_dir / "kernel.csv", csv.str());

  json j;
  j["config"] = config_block(cfg);
  j["subcommand"] = "kernel";
  j["times"] = times;
  j["rows"] = times.size() * times.size();
  write_file(out_dir / "kernel.json", j.dump(2) + "\n");
  return 0;
}

json covariance_block(const CovarianceCheck& check, double& fraction_out) {
  const Eigen::Index k = check.target.rows();
  std::size_t within = 0;
  for (Eigen::Index a = 0; a < k; ++a) {
    for (Eigen::Index b = a; b < k; ++b) {
      if (std::abs(check.empirical(a, b) - check.target(a, b)) <=
          3.0 * std::max(check.std_error(a, b), 1e-300)) {
        ++within;
      }
    }
  }
  fraction_out = static_cast<double>(within) /
                 (static_cast<double>(k * (k + 1)) / 2.0);
  json j;
  j["target"] = matrix_to_json(check.target);
  j["empirical"] = matrix_to_json(check.empirical);
  j["std_error"] = matrix_to_json(check.std_error);
  j["max_abs_error"] = check.max_abs_error;
  j["max_z"] = check.max_z;
  j["within_3se_fraction"] = fraction_out;
  return j;
}

void write_draws_csv(const fs::path& path, const PathEnsemble& ens) {
  std::ostringstream csv;
  std::vector<std::string> header = {"draw"};
  for (const double t : ens.times) header.push_back("t=" + format_g17(t));
  CsvWriter writer(csv, header);
  std::vector<double> row(ens.times.size() + 1);
  for (std::size_t i = 0; i < ens.n_paths(); ++i) {
    row[0] = static_cast<double>(i);
    for (std::size_t j = 0; j < ens.times.size(); ++j) {
      row[j + 1] = ens.paths(static_cast<Eigen::Index>(i),
                             static_cast<Eigen::Index>(j));
    }
    writer.row(row);
  }
  write_file(path, csv.str());
}

int run_sample(const RunConfig& cfg, const fs::path& out_dir) {
  const std::uint64_t seed = require_seed(cfg);
  const SpectralDensity m = make_density(cfg.density);
  const KernelEvaluator kernel(m, cfg.kernel);
  const std::vector<double> times = cfg.grid_times();

  std::vector<std::pair<std::string, SampleMethod>> methods;
  if (cfg.mc.method == "cholesky" || cfg.mc.method == "both") {
    methods.emplace_back("cholesky", SampleMethod::kCholesky);
  }
  if (cfg.mc.method == "spectral" || cfg.mc.method == "both") {
    methods.emplace_back("spectral", SampleMethod::kSpectral);
  }

  json j;
  j["config"] = config_block(cfg);
  j["subcommand"] = "sample";
  bool pass = true;
  std::vector<CovarianceCheck> checks;
  for (const auto& [name, method] : methods) {
    const PathEnsemble ens = sample_paths(kernel, times, cfg.mc.n, seed, method);
    write_draws_csv(out_dir / ("samples_" + name + ".csv"), ens);
    checks.push_back(covariance_check(ens, kernel));
    double fraction = 0.0;
    j["methods"][name] = covariance_block(checks.back(), fraction);
    pass = pass && fraction >= 0.95;
  }

  if (checks.size() == 2) {
    const Eigen::Index k = checks[0].target.rows();
    std::size_t within = 0;
    double max_z = 0.0;
    for (Eigen::Index a = 0; a < k; ++a) {
      for (Eigen::Index b = a; b < k; ++b) {
        const double se =
            std::sqrt(checks[0].std_error(a, b) * checks[0].std_error(a, b) +
                      checks[1].std_error(a, b) * checks[1].std_error(a, b));
        const double z =
            std::abs(checks[0].empirical(a, b) - checks[1].empirical(a, b)) /
            std::max(se, 1e-300);
        max_z = std::max(max_z, z);
        if (z <= 3.0) ++within;
      }
    }
    const double fraction = static_cast<double>(within) /
                            (static_cast<double>(k * (k + 1)) / 2.0);
    j["cross_agreement"] = {{"within_3se_fraction", fraction},
                            {"max_z", max_z}};
    pass = pass && fraction >= 0.95;
  }

  j["pass"] = pass;
  write_file(out_dir / "sample.json", j.dump(2) + "\n");
  return pass ? 0 : 1;
}

int run_verify(const RunConfig& cfg, const fs::path& out_dir) {
  const std::uint64_t seed = require_seed(cfg);
  const SpectralDensity m = make_density(cfg.density);

  IdentitySuiteOptions opts;
  opts.probes = cfg.probe_list();
  opts.mc_samples = cfg.mc.n;
  opts.seed = seed;
  const IdentitySuiteReport report = verify_identities(m, cfg.kernel, opts);

  json j;
  j["config"] = config_block(cfg);
  j["subcommand"] = "verify-identities";
  j["density"] = report.density_name;
  j["identities"] = json::array();
  for (const IdentityResult& r : report.identities) {
    json probe_errors = json::array();
    for (const ProbeError& pe : r.probe_errors) {
      probe_errors.push_back(
          {{"probe", probe_to_json(pe.probe)}, {"error", pe.error}});
    }
    j["identities"].push_back({{"identity", r.identity},
                               {"max_error", r.max_error},
                               {"tolerance", r.tolerance},
                               {"require_above", r.require_above},
                               {"pass", r.pass},
                               {"probe_errors", std::move(probe_errors)}});
  }
  j["routes"] = json::array();
  for (const RouteAgreement& ra : report.routes) {
    json entry = {{"functional", ra.functional},
                  {"closed", ra.closed},
                  {"quadrature", ra.quadrature},
                  {"closed_vs_quadrature", ra.closed_vs_quadrature}};
    if (ra.mc_ran) {
      entry["mc_mean"] = ra.mc_mean;
      entry["mc_std_error"] = ra.mc_std_error;
      entry["mc_z"] = ra.mc_z;
    }
    j["routes"].push_back(std::move(entry));
  }
  j["max_error"] = report.max_error;
  j["pass"] = report.all_pass;
  write_file(out_dir / "verify_identities.json", j.dump(2) + "\n");
  return report.all_pass ? 0 : 1;
}

int run_ito(const RunConfig& cfg, const fs::path& out_dir) {
  const std::uint64_t seed = require_seed(cfg);
  const SpectralDensity m = make_density(cfg.density);
  const SmCalculus calc(m, cfg.kernel);

  const Direction dir = parse_direction_shorthand(cfg.ito.f);
  const MaskedDirection f{dir, 0.0, cfg.ito.tau};
  const std::vector<ProbeSpec> probes = cfg.probe_list();

  ItoOptions opts;
  opts.mc_paths = cfg.ito.mc_n;
  opts.seed = seed;

  struct Case {
    FRecord record;
    double probe_tol;
    double expectation_tol;
  };
  const std::vector<Case> cases = {
      {{[](double x) { return x * x; }, [](double x) { return 2.0 * x; },
        [](double) { return 2.0; }, "x_squared"},
       1e-5, 1e-6},
      {{[](double x) { return x; }, [](double) { return 1.0; },
        [](double) { return 0.0; }, "identity"},
       1e-6, 1e-8},
      {{[](double x) { return std::cos(x); },
        [](double x) { return -std::sin(x); },
        [](double x) { return -std::cos(x); }, "cosine"},
       1e-3, 1e-6},
  };

  json j;
  j["config"] = config_block(cfg);
  j["subcommand"] = "ito-check";
  j["cases"] = json::array();
  bool pass = true;
  for (const Case& c : cases) {
    const ItoReport rep = ito_check(calc, c.record, f, probes, opts);
    json probe_results = json::array();
    for (const ItoProbeResult& pr : rep.probe_results) {
      probe_results.push_back({{"probe", probe_to_json(pr.probe)},
                               {"lhs", pr.lhs},
                               {"db_term", pr.db_term},
                               {"dt_term", pr.dt_term},
                               {"abs_error", pr.abs_error}});
    }
    const double expectation_error = rep.probe_results.front().abs_error;
    bool case_pass = rep.max_abs_error < c.probe_tol &&
                     expectation_error < c.expectation_tol;
    json entry = {{"name", c.record.name},
                  {"probe_results", std::move(probe_results)},
                  {"max_abs_error", rep.max_abs_error},
                  {"probe_tolerance", c.probe_tol},
                  {"expectation_error", expectation_error},
                  {"expectation_tolerance", c.expectation_tol}};
    if (rep.mc_ran) {
      entry["mc_mean"] = rep.mc_mean;
      entry["mc_std_error"] = rep.mc_std_error;
      entry["mc_reference"] = rep.mc_reference;
      entry["mc_z"] = rep.mc_z;
      case_pass = case_pass && rep.mc_z < 4.0;
    }
    if (c.record.name == "cosine") {
      // Gaussian characteristic-function reference: E[cos X_tau] - 1.
      VarianceCurve vc(calc, f, cfg.ito.tau);
      const double analytic = std::exp(-0.5 * vc.value(cfg.ito.tau)) - 1.0;
      entry["analytic_expectation"] = analytic;
      const double analytic_error =
          std::abs(rep.probe_results.front().lhs - analytic);
      entry["analytic_error"] = analytic_error;
      case_pass = case_pass && analytic_error < c.expectation_tol;
    }
    entry["pass"] = case_pass;
    pass = pass && case_pass;
    j["cases"].push_back(std::move(entry));
  }
  j["pass"] = pass;
  write_file(out_dir / "ito_check.json", j.dump(2) + "\n");
  return pass ? 0 : 1;
}

int run_girsanov(const RunConfig& cfg, const fs::path& out_dir) {
  const std::uint64_t seed = require_seed(cfg);
  const SpectralDensity m = make_density(cfg.density);
  const SmCalculus calc(m, cfg.kernel);

  const Direction dir = parse_direction_shorthand(cfg.girsanov.f);
  const MaskedDirection f = window_for(dir, cfg.grid.t_max);
  const std::vector<double> times =
      cfg.girsanov.times.empty() ? cfg.grid_times() : cfg.girsanov.times;

  const GirsanovReport rep = girsanov_check(calc, f, times, cfg.mc.n, seed);

  const bool pass = rep.max_z <= 5.0 && rep.cov_within_3se >= 0.95 &&
                    rep.weight_z <= 5.0;

  json j;
  j["config"] = config_block(cfg);
  j["subcommand"] = "girsanov-check";
  j["times"] = rep.times;
  j["expected_shift"] = rep.expected_shift;
  j["weighted_mean"] = rep.weighted_mean;
  j["std_error"] = rep.std_error;
  j["norm_sq_f"] = rep.norm_sq_f;
  j["ess"] = rep.ess;
  j["low_ess"] = rep.low_ess;
  j["max_z"] = rep.max_z;
  j["n_paths"] = rep.n_paths;
  j["cov_target"] = matrix_to_json(rep.cov_target);
  j["cov_weighted"] = matrix_to_json(rep.cov_weighted);
  j["cov_std_error"] = matrix_to_json(rep.cov_std_error);
  j["cov_within_3se_fraction"] = rep.cov_within_3se;
  j["weight_mean"] = rep.weight_mean;
  j["weight_std_error"] = rep.weight_std_error;
  j["weight_z"] = rep.weight_z;
  j["pass"] = pass;
  write_file(out_dir / "girsanov_check.json", j.dump(2) + "\n");
  return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "spectral-wick: covariance kernels, path sampling, and Wick-Ito "
      "calculus for Gaussian stationary-increment processes defined by a "
      "spectral density"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out_flag;
  std::string density_flag;
  std::uint64_t seed_flag = 0;
  auto* config_opt =
      app.add_option("--config", config_path, "Configuration file path");
  auto* seed_opt = app.add_option("--seed", seed_flag,
                                  "Random seed (overrides [mc] seed)");
  auto* out_opt =
      app.add_option("--out", out_flag, "Output directory (overrides [output] dir)");
  auto* density_opt = app.add_option(
      "--density", density_flag,
      "Density shorthand KIND[:params], e.g. fractional:0.75");

  auto* kernel_cmd = app.add_subcommand(
      "kernel", "Covariance kernel and r(t) on a time grid (CSV)");
  auto* sample_cmd = app.add_subcommand(
      "sample", "Draw path ensembles and compare empirical vs analytic "
                "covariance");
  auto* verify_cmd = app.add_subcommand(
      "verify-identities",
      "Stochastic-integral identities and transform-route agreement");
  auto* ito_cmd = app.add_subcommand(
      "ito-check", "Change-of-variable formula at probe, expectation, and "
                   "Monte Carlo levels");
  auto* girsanov_cmd = app.add_subcommand(
      "girsanov-check", "Measure-change shift of the weighted path law");

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg;
    if (config_opt->count() > 0) cfg = parse_config_file(config_path);
    if (density_opt->count() > 0) {
      cfg.density = parse_density_shorthand(density_flag);
    }
    if (seed_opt->count() > 0) cfg.mc.seed = seed_flag;
    if (out_opt->count() > 0) cfg.output.dir = out_flag;

    const fs::path out_dir(cfg.output.dir);
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) {
      throw ConfigError("output.dir", "cannot create directory '" +
                                          out_dir.string() + "': " +
                                          ec.message());
    }

    int rc = 3;
    if (kernel_cmd->parsed()) rc = run_kernel(cfg, out_dir);
    if (sample_cmd->parsed()) rc = run_sample(cfg, out_dir);
    if (verify_cmd->parsed()) rc = run_verify(cfg, out_dir);
    if (ito_cmd->parsed()) rc = run_ito(cfg, out_dir);
    if (girsanov_cmd->parsed()) rc = run_girsanov(cfg, out_dir);
    return rc;
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}
