#include "spectral_wick/run_config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <variant>

#include <nlohmann/json.hpp>

#include "spectral_wick/errors.hpp"
#include "spectral_wick/version.hpp"

namespace spectral_wick {

namespace {

struct Value;
using Table = std::map<std::string, Value>;

struct Value {
  std::variant<double, bool, std::string, std::vector<Value>, Table> v;
};

std::string strip_comment(const std::string& line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_string = !in_string;
    if (line[i] == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

int bracket_balance(const std::string& s) {
  int depth = 0;
  bool in_string = false;
  for (char c : s) {
    if (c == '"') in_string = !in_string;
    if (in_string) continue;
    if (c == '[' || c == '{') ++depth;
    if (c == ']' || c == '}') --depth;
  }
  return depth;
}

// Recursive parser for one value expression (string, number, bool, array,
// inline table).  `key` is the dotted path, used only for error messages.
class ValueParser {
 public:
  ValueParser(const std::string& text, const std::string& key)
      : s_(text), key_(key) {}

  Value parse_all() {
    Value v = parse_value();
    skip_ws();
    if (pos_ != s_.size()) fail("trailing characters after value");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& what) {
    throw ConfigError(key_, what + " in '" + s_ + "'");
  }

  void skip_ws() {
    while (pos_ < s_.size() &&
           std::isspace(static_cast<unsigned char>(s_[pos_]))) {
      ++pos_;
    }
  }

  char peek() { return pos_ < s_.size() ? s_[pos_] : '\0'; }

  Value parse_value() {
    skip_ws();
    const char c = peek();
    if (c == '"') return parse_string();
    if (c == '[') return parse_array();
    if (c == '{') return parse_table();
    return parse_bare();
  }

  Value parse_string() {
    ++pos_;  // opening quote
    std::string out;
    while (pos_ < s_.size() && s_[pos_] != '"') out.push_back(s_[pos_++]);
    if (pos_ == s_.size()) fail("unterminated string");
    ++pos_;
    return Value{out};
  }

  Value parse_array() {
    ++pos_;  // '['
    std::vector<Value> items;
    skip_ws();
    if (peek() == ']') {
      ++pos_;
      return Value{std::move(items)};
    }
    while (true) {
      items.push_back(parse_value());
      skip_ws();
      if (peek() == ',') {
        ++pos_;
        skip_ws();
        if (peek() == ']') {  // trailing comma
          ++pos_;
          break;
        }
        continue;
      }
      if (peek() == ']') {
        ++pos_;
        break;
      }
      fail("expected ',' or ']' in array");
    }
    return Value{std::move(items)};
  }

  Value parse_table() {
    ++pos_;  // '{'
    Table t;
    skip_ws();
    if (peek() == '}') {
      ++pos_;
      return Value{std::move(t)};
    }
    while (true) {
      skip_ws();
      std::string key;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) ||
              s_[pos_] == '_')) {
        key.push_back(s_[pos_++]);
      }
      if (key.empty()) fail("expected key in inline table");
      skip_ws();
      if (peek() != '=') fail("expected '=' after key '" + key + "'");
      ++pos_;
      if (!t.emplace(key, parse_value()).second) {
        fail("duplicate key '" + key + "' in inline table");
      }
      skip_ws();
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      if (peek() == '}') {
        ++pos_;
        break;
      }
      fail("expected ',' or '}' in inline table");
    }
    return Value{std::move(t)};
  }

  Value parse_bare() {
    std::string tok;
    while (pos_ < s_.size() && s_[pos_] != ',' && s_[pos_] != ']' &&
           s_[pos_] != '}' &&
           !std::isspace(static_cast<unsigned char>(s_[pos_]))) {
      tok.push_back(s_[pos_++]);
    }
    if (tok == "true") return Value{true};
    if (tok == "false") return Value{false};
    try {
      std::size_t used = 0;
      const double x = std::stod(tok, &used);
      if (used == tok.size()) return Value{x};
    } catch (const std::exception&) {
    }
    fail("expected a number, boolean, string, array, or table; got '" + tok +
         "'");
  }

  const std::string& s_;
  std::string key_;
  std::size_t pos_ = 0;
};

void insert_path(Table& root, const std::string& path, Value value) {
  Table* t = &root;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = path.find('.', start);
    const std::string part = path.substr(
        start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw ConfigError(path, "empty key component");
    if (dot == std::string::npos) {
      if (!t->emplace(part, std::move(value)).second) {
        throw ConfigError(path, "duplicate key");
      }
      return;
    }
    auto [it, inserted] = t->emplace(part, Value{Table{}});
    Table* next = std::get_if<Table>(&it->second.v);
    if (next == nullptr) throw ConfigError(path, "duplicate key");
    t = next;
    start = dot + 1;
  }
}

void collect_leaf_paths(const Table& t, const std::string& prefix,
                        std::set<std::string>& out) {
  for (const auto& [key, value] : t) {
    const std::string path = prefix.empty() ? key : prefix + "." + key;
    if (const Table* sub = std::get_if<Table>(&value.v)) {
      collect_leaf_paths(*sub, path, out);
    } else {
      out.insert(path);
    }
  }
}

// Typed access into the parsed tree with unknown-key detection: every lookup
// marks the path consumed; leftovers are reported by name.
class Reader {
 public:
  explicit Reader(Table root) : root_(std::move(root)) {
    collect_leaf_paths(root_, "", unconsumed_);
  }

  double num(const std::string& path, double def) {
    const Value* v = lookup(path);
    if (v == nullptr) return def;
    if (const double* x = std::get_if<double>(&v->v)) return *x;
    throw ConfigError(path, "expected a number");
  }

  std::size_t count(const std::string& path, std::size_t def) {
    const double x = num(path, static_cast<double>(def));
    if (x < 0 || x != std::floor(x)) {
      throw ConfigError(path, "expected a nonnegative integer");
    }
    return static_cast<std::size_t>(x);
  }

  std::optional<std::uint64_t> opt_count(const std::string& path) {
    if (lookup_peek(path) == nullptr) return std::nullopt;
    return count(path, 0);
  }

  std::string str(const std::string& path, const std::string& def) {
    const Value* v = lookup(path);
    if (v == nullptr) return def;
    if (const std::string* x = std::get_if<std::string>(&v->v)) return *x;
    throw ConfigError(path, "expected a string");
  }

  bool is_string(const std::string& path) const {
    const Value* v = lookup_peek(path);
    return v != nullptr && std::holds_alternative<std::string>(v->v);
  }

  bool boolean(const std::string& path, bool def) {
    const Value* v = lookup(path);
    if (v == nullptr) return def;
    if (const bool* x = std::get_if<bool>(&v->v)) return *x;
    throw ConfigError(path, "expected true or false");
  }

  std::vector<double> num_array(const std::string& path) {
    const Value* v = lookup(path);
    std::vector<double> out;
    if (v == nullptr) return out;
    const auto* items = std::get_if<std::vector<Value>>(&v->v);
    if (items == nullptr) throw ConfigError(path, "expected an array");
    for (const Value& item : *items) {
      const double* x = std::get_if<double>(&item.v);
      if (x == nullptr) throw ConfigError(path, "expected an array of numbers");
      out.push_back(*x);
    }
    return out;
  }

  std::vector<Table> table_array(const std::string& path) {
    const Value* v = lookup(path);
    std::vector<Table> out;
    if (v == nullptr) return out;
    const auto* items = std::get_if<std::vector<Value>>(&v->v);
    if (items == nullptr) throw ConfigError(path, "expected an array");
    for (const Value& item : *items) {
      const Table* t = std::get_if<Table>(&item.v);
      if (t == nullptr) throw ConfigError(path, "expected an array of tables");
      out.push_back(*t);
    }
    return out;
  }

  void finish() const {
    if (!unconsumed_.empty()) {
      throw ConfigError(*unconsumed_.begin(), "unknown key");
    }
  }

 private:
  const Value* lookup_peek(const std::string& path) const {
    const Table* t = &root_;
    std::size_t start = 0;
    while (true) {
      const std::size_t dot = path.find('.', start);
      const std::string part = path.substr(
          start, dot == std::string::npos ? std::string::npos : dot - start);
      const auto it = t->find(part);
      if (it == t->end()) return nullptr;
      if (dot == std::string::npos) return &it->second;
      t = std::get_if<Table>(&it->second.v);
      if (t == nullptr) return nullptr;
      start = dot + 1;
    }
  }

  const Value* lookup(const std::string& path) {
    const Value* v = lookup_peek(path);
    if (v != nullptr) {
      for (auto it = unconsumed_.lower_bound(path); it != unconsumed_.end();) {
        if (*it == path ||
            (it->size() > path.size() && it->compare(0, path.size(), path) == 0 &&
             (*it)[path.size()] == '.')) {
          it = unconsumed_.erase(it);
        } else {
          break;
        }
      }
    }
    return v;
  }

  Table root_;
  std::set<std::string> unconsumed_;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t p = s.find(sep, start);
    out.push_back(s.substr(start, p == std::string::npos ? std::string::npos
                                                         : p - start));
    if (p == std::string::npos) break;
    start = p + 1;
  }
  return out;
}

double parse_param(const std::string& text, const std::string& context) {
  try {
    std::size_t used = 0;
    const double x = std::stod(text, &used);
    if (used == text.size()) return x;
  } catch (const std::exception&) {
  }
  throw ConfigError(context, "expected a number, got '" + text + "'");
}

}  // namespace

std::vector<double> RunConfig::grid_times() const {
  std::vector<double> times(static_cast<std::size_t>(grid.points));
  for (int j = 0; j < grid.points; ++j) {
    times[static_cast<std::size_t>(j)] =
        grid.t_max * static_cast<double>(j + 1) / grid.points;
  }
  return times;
}

std::vector<ProbeSpec> RunConfig::probe_list() const {
  std::vector<ProbeSpec> out;
  if (probes.standard) out = standard_probe_specs();
  out.insert(out.end(), probes.custom.begin(), probes.custom.end());
  return out;
}

RunConfig parse_config_text(const std::string& text) {
  Table root;
  std::istringstream in(text);
  std::string line;
  std::string section;
  while (std::getline(in, line)) {
    line = trim(strip_comment(line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError(line, "malformed section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) throw ConfigError(line, "empty section name");
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(line, "expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty() ||
        !std::all_of(key.begin(), key.end(), [](unsigned char c) {
          return std::isalnum(c) || c == '_' || c == '.';
        })) {
      throw ConfigError(key, "malformed key");
    }
    std::string value_text = trim(line.substr(eq + 1));
    while (bracket_balance(value_text) > 0 && std::getline(in, line)) {
      value_text += " " + trim(strip_comment(line));
    }
    const std::string path = section.empty() ? key : section + "." + key;
    insert_path(root, path, ValueParser(value_text, path).parse_all());
  }

  Reader r(std::move(root));
  RunConfig cfg;

  // Either the shorthand string used by the CLI flag ("fractional:0.7") or
  // the [density] section with explicit fields.
  if (r.is_string("density")) {
    cfg.density = parse_density_shorthand(r.str("density", ""));
  }
  cfg.density.kind = r.str("density.kind", cfg.density.kind);
  cfg.density.hurst = r.num("density.H", r.num("density.hurst", cfg.density.hurst));
  cfg.density.delta = r.num("density.delta", cfg.density.delta);

  cfg.kernel.freq_cutoff = r.num("kernel.freq_cutoff", cfg.kernel.freq_cutoff);
  cfg.kernel.abs_tol = r.num("kernel.abs_tol", cfg.kernel.abs_tol);
  cfg.kernel.max_panels =
      static_cast<int>(r.count("kernel.max_panels",
                               static_cast<std::size_t>(cfg.kernel.max_panels)));
  cfg.kernel.graded_mesh_levels = static_cast<int>(
      r.count("kernel.graded_mesh_levels",
              static_cast<std::size_t>(cfg.kernel.graded_mesh_levels)));

  cfg.grid.t_max = r.num("grid.t_max", cfg.grid.t_max);
  cfg.grid.points = static_cast<int>(
      r.count("grid.points", static_cast<std::size_t>(cfg.grid.points)));
  if (cfg.grid.t_max <= 0) throw ConfigError("grid.t_max", "must be positive");
  if (cfg.grid.points < 1) throw ConfigError("grid.points", "must be >= 1");

  cfg.mc.n = r.count("mc.n", cfg.mc.n);
  cfg.mc.seed = r.opt_count("mc.seed");
  cfg.mc.method = r.str("mc.method", cfg.mc.method);
  if (cfg.mc.method != "cholesky" && cfg.mc.method != "spectral" &&
      cfg.mc.method != "both") {
    throw ConfigError("mc.method", "must be cholesky, spectral, or both");
  }

  cfg.probes.standard = r.boolean("probes.standard", cfg.probes.standard);
  for (const Table& t : r.table_array("probes.custom")) {
    Reader pr(t);
    ProbeSpec ps;
    ps.center = pr.num("center", 0.0);
    ps.width = pr.num("width", 1.0);
    ps.amp = pr.num("amp", 1.0);
    pr.finish();
    if (ps.width <= 0) throw ConfigError("probes.custom.width", "must be positive");
    cfg.probes.custom.push_back(ps);
  }

  cfg.girsanov.f = r.str("girsanov.f", cfg.girsanov.f);
  cfg.girsanov.times = r.num_array("girsanov.times");

  cfg.ito.tau = r.num("ito.tau", cfg.ito.tau);
  cfg.ito.f = r.str("ito.f", cfg.ito.f);
  cfg.ito.mc_n = r.count("ito.mc_n", cfg.ito.mc_n);
  if (cfg.ito.tau <= 0) throw ConfigError("ito.tau", "must be positive");

  cfg.output.dir = r.str("output.dir", cfg.output.dir);

  r.finish();

  // Validate the density spec eagerly so bad configs fail at parse time.
  make_density(cfg.density);
  parse_direction_shorthand(cfg.girsanov.f);
  parse_direction_shorthand(cfg.ito.f);
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

DensitySpec parse_density_shorthand(const std::string& text) {
  const auto parts = split(text, ':');
  DensitySpec spec;
  spec.kind = parts[0];
  const auto expect = [&](std::size_t n) {
    if (parts.size() != n + 1) {
      throw ConfigError("density",
                        "'" + text + "': expected " + std::to_string(n) +
                            " parameter(s) for kind '" + spec.kind + "'");
    }
  };
  if (spec.kind == "white") {
    expect(0);
  } else if (spec.kind == "fractional") {
    expect(1);
    spec.hurst = parse_param(parts[1], "density");
  } else if (spec.kind == "band_limited") {
    expect(1);
    spec.delta = parse_param(parts[1], "density");
  } else if (spec.kind == "band_limited_fractional") {
    expect(2);
    spec.hurst = parse_param(parts[1], "density");
    spec.delta = parse_param(parts[2], "density");
  } else {
    throw ConfigError("density", "unknown density kind '" + spec.kind + "'");
  }
  return spec;
}

SpectralDensity make_density(const DensitySpec& spec) {
  try {
    if (spec.kind == "white") return SpectralDensity::white();
    if (spec.kind == "fractional") {
      return SpectralDensity::fractional(spec.hurst);
    }
    if (spec.kind == "band_limited") {
      return SpectralDensity::band_limited(spec.delta);
    }
    if (spec.kind == "band_limited_fractional") {
      return SpectralDensity::band_limited_fractional(spec.hurst, spec.delta);
    }
  } catch (const InvalidArgumentError& e) {
    throw ConfigError("density", e.what());
  }
  throw ConfigError("density.kind",
                    "unknown density kind '" + spec.kind + "'");
}

Direction parse_direction_shorthand(const std::string& text) {
  const auto parts = split(text, ':');
  const std::string& kind = parts[0];
  const auto expect = [&](std::size_t n) {
    if (parts.size() != n + 1) {
      throw ConfigError("direction",
                        "'" + text + "': expected " + std::to_string(n) +
                            " parameter(s) for kind '" + kind + "'");
    }
  };
  if (kind == "constant") {
    expect(1);
    return ConstantDirection{parse_param(parts[1], "direction")};
  }
  if (kind == "indicator") {
    expect(2);
    const double a = parse_param(parts[1], "direction");
    const double b = parse_param(parts[2], "direction");
    if (!(a < b)) throw ConfigError("direction", "indicator needs a < b");
    return IndicatorDirection{a, b};
  }
  if (kind == "bump") {
    expect(3);
    const double c = parse_param(parts[1], "direction");
    const double w = parse_param(parts[2], "direction");
    const double amp = parse_param(parts[3], "direction");
    if (w <= 0) throw ConfigError("direction", "bump width must be positive");
    return BumpDirection{c, w, amp};
  }
  throw ConfigError("direction", "unknown direction kind '" + kind + "'");
}

std::string config_json(const RunConfig& config) {
  nlohmann::json j;
  j["version"] = kVersion;
  j["density"] = {{"kind", config.density.kind},
                  {"H", config.density.hurst},
                  {"delta", config.density.delta}};
  j["kernel"] = {{"freq_cutoff", config.kernel.freq_cutoff},
                 {"abs_tol", config.kernel.abs_tol},
                 {"max_panels", config.kernel.max_panels},
                 {"graded_mesh_levels", config.kernel.graded_mesh_levels}};
  j["grid"] = {{"t_max", config.grid.t_max}, {"points", config.grid.points}};
  j["mc"] = {{"n", config.mc.n}, {"method", config.mc.method}};
  if (config.mc.seed.has_value()) j["mc"]["seed"] = *config.mc.seed;
  j["probes"]["standard"] = config.probes.standard;
  j["probes"]["custom"] = nlohmann::json::array();
  for (const ProbeSpec& ps : config.probes.custom) {
    j["probes"]["custom"].push_back(
        {{"center", ps.center}, {"width", ps.width}, {"amp", ps.amp}});
  }
  j["girsanov"] = {{"f", config.girsanov.f},
                   {"times", config.girsanov.times}};
  j["ito"] = {{"tau", config.ito.tau},
              {"f", config.ito.f},
              {"mc_n", config.ito.mc_n}};
  j["output"] = {{"dir", config.output.dir}};
  return j.dump();
}

std::string format_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

CsvWriter::CsvWriter(std::ostream& out, std::span<const std::string> header)
    : out_(out), columns_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i > 0) out_ << ',';
    out_ << header[i];
  }
  out_ << '\n';
}

void CsvWriter::row(std::span<const double> values) {
  if (values.size() != columns_) {
    throw InvalidArgumentError("CSV row width does not match the header");
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out_ << ',';
    out_ << format_g17(values[i]);
  }
  out_ << '\n';
}

}  // namespace spectral_wick
