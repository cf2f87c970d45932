#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "spectral_wick/density.hpp"
#include "spectral_wick/direction.hpp"
#include "spectral_wick/kernel.hpp"
#include "spectral_wick/s_transform.hpp"

namespace spectral_wick {

// Structured run configuration: a single key-value text file with sections
//
//   [density]   kind = "fractional", H = 0.75, delta = 1.0
//   [kernel]    freq_cutoff, abs_tol, max_panels, graded_mesh_levels
//   [grid]      t_max, points            (evaluation times t_max * j / points)
//   [mc]        n, seed, method          (method: cholesky | spectral | both)
//   [probes]    standard = true  or  custom = [ { center, width, amp }, ... ]
//   [girsanov]  f = "indicator:0:1", times = [ ... ]   (empty: grid times)
//   [ito]       tau, f = "constant:1", mc_n
//   [output]    dir
//
// Inline tables (`density = { kind = "white" }`) are accepted at top level as
// an equivalent spelling of a section.  All numeric fields are decimal.
// Unknown or ill-typed keys raise ConfigError naming the offending key.

struct DensitySpec {
  std::string kind = "white";
  double hurst = 0.75;  // fractional kinds
  double delta = 1.0;   // band-limited kinds
};

struct GridSection {
  double t_max = 3.0;
  int points = 16;
};

struct McSection {
  std::size_t n = 20000;
  std::optional<std::uint64_t> seed;
  std::string method = "both";
};

struct ProbesSection {
  bool standard = true;
  std::vector<ProbeSpec> custom;
};

struct GirsanovSection {
  std::string f = "indicator:0:1";
  std::vector<double> times;  // empty: use the grid times
};

struct ItoSection {
  double tau = 1.0;
  std::string f = "constant:1";
  std::size_t mc_n = 100000;
};

struct OutputSection {
  std::string dir = ".";
};

struct RunConfig {
  DensitySpec density;
  KernelConfig kernel;
  GridSection grid;
  McSection mc;
  ProbesSection probes;
  GirsanovSection girsanov;
  ItoSection ito;
  OutputSection output;

  std::vector<double> grid_times() const;   // t_max * (j+1)/points, j < points
  std::vector<ProbeSpec> probe_list() const;
};

RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

// "KIND[:param[:param]]" shorthand: "white", "fractional:0.7",
// "band_limited:2.5", "band_limited_fractional:0.7:2.5".
DensitySpec parse_density_shorthand(const std::string& text);
SpectralDensity make_density(const DensitySpec& spec);

// "constant:VALUE" | "indicator:A:B" | "bump:CENTER:WIDTH:AMP".
Direction parse_direction_shorthand(const std::string& text);

// The full resolved configuration (defaults filled in) plus the library
// version, as a JSON object with sorted keys; embedded in every JSON report.
std::string config_json(const RunConfig& config);

// CSV emission: header row, 17-significant-digit decimals, comma delimiter,
// LF line endings.
std::string format_g17(double x);

class CsvWriter {
 public:
  CsvWriter(std::ostream& out, std::span<const std::string> header);
  void row(std::span<const double> values);

 private:
  std::ostream& out_;
  std::size_t columns_;
};

}  // namespace spectral_wick
