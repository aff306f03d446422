#include "lzeros/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "lzeros/errors.hpp"
#include "lzeros/toml.hpp"

namespace lzeros {
namespace {

using json = nlohmann::json;

// Typed access to one config table with unknown-key detection.
class Table {
 public:
  Table(const json& j, std::string name) : j_(j), name_(std::move(name)) {
    if (!j_.is_object()) throw ConfigError("[" + name_ + "] must be a table");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  double number(const std::string& key) const {
    const json& v = at(key);
    if (!v.is_number()) bad(key, "a number");
    const double x = v.get<double>();
    if (std::isnan(x)) bad(key, "a number other than nan");
    return x;
  }
  double number(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }

  long long integer(const std::string& key) const {
    const json& v = at(key);
    if (v.is_number_integer()) return v.get<long long>();
    if (v.is_number_float()) {
      const double x = v.get<double>();
      if (std::isfinite(x) && std::floor(x) == x && std::abs(x) < 9e15) return static_cast<long long>(x);
    }
    bad(key, "an integer");
  }
  long long integer(const std::string& key, long long fallback) const {
    return has(key) ? integer(key) : fallback;
  }

  bool boolean(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const json& v = at(key);
    if (!v.is_boolean()) bad(key, "true or false");
    return v.get<bool>();
  }

  std::string string(const std::string& key) const {
    const json& v = at(key);
    if (!v.is_string()) bad(key, "a string");
    return v.get<std::string>();
  }
  std::string string(const std::string& key, const std::string& fallback) const {
    return has(key) ? string(key) : fallback;
  }

  std::vector<double> numbers(const std::string& key) const {
    const json& v = at(key);
    if (!v.is_array()) bad(key, "an array of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
      if (!x.is_number()) bad(key, "an array of numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }

  std::vector<std::string> strings(const std::string& key) const {
    const json& v = at(key);
    if (!v.is_array()) bad(key, "an array of strings");
    std::vector<std::string> out;
    for (const auto& x : v) {
      if (!x.is_string()) bad(key, "an array of strings");
      out.push_back(x.get<std::string>());
    }
    return out;
  }

  void only(std::initializer_list<const char*> allowed) const {
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!ok.count(it.key())) throw ConfigError("unknown key '" + it.key() + "' in [" + name_ + "]");
  }

  [[noreturn]] void bad(const std::string& key, const std::string& what) const {
    throw ConfigError(name_ + "." + key + " must be " + what);
  }

 private:
  const json& at(const std::string& key) const {
    if (!j_.contains(key)) throw ConfigError("missing key " + name_ + "." + key);
    return j_.at(key);
  }

  const json& j_;
  std::string name_;
};

int checked_int(long long v, const std::string& what) {
  if (v < -2147483647LL || v > 2147483647LL) throw ConfigError(what + " is out of range");
  return static_cast<int>(v);
}

Sector parse_sector(const std::string& s) {
  if (s == "even") return Sector::even_parity;
  if (s == "odd") return Sector::odd_parity;
  if (s == "full") return Sector::full;
  throw ConfigError("sector must be \"even\", \"odd\" or \"full\", got \"" + s + "\"");
}

Units parse_units(const std::string& s) {
  if (s == "per_site") return Units::per_site;
  if (s == "extensive") return Units::extensive;
  throw ConfigError("units must be \"per_site\" or \"extensive\", got \"" + s + "\"");
}

SpinModelConfig parse_spin(const Table& t) {
  t.only({"N", "alpha", "h_i", "h_f", "sector", "units"});
  SpinModelConfig c;
  c.N = checked_int(t.integer("N"), "ising.N");
  c.alpha = t.number("alpha", 0.0);
  c.h_i = t.number("h_i");
  c.h_f = t.number("h_f");
  c.sector = parse_sector(t.string("sector", "even"));
  c.units = t.has("units") ? parse_units(t.string("units")) : IsingSpec::default_units(c.alpha);
  return c;
}

TwoBandConfig parse_two_band(const Table& t, ModelKind kind) {
  TwoBandConfig c;
  if (kind == ModelKind::ising_nn) {
    t.only({"N", "h_i", "h_f", "energy_scale"});
    c.energy_scale = t.number("energy_scale", kIsingEnergyScale);
  } else {
    t.only({"N", "h_i", "h_f", "gamma_i", "gamma_f"});
    c.gamma_i = t.number("gamma_i", 1.0);
    c.gamma_f = t.number("gamma_f", 1.0);
    c.energy_scale = 1.0;
  }
  c.N = checked_int(t.integer("N"), "N");
  c.h_i = t.number("h_i");
  c.h_f = t.number("h_f");
  return c;
}

GaussianConfig parse_gaussian(const Table& t) {
  t.only({"delta", "epsilon", "sigma", "mu", "j_min", "j_max", "E_GS", "trajectory_periods", "line_samples"});
  GaussianConfig c;
  c.spec.delta = t.number("delta");
  c.spec.epsilon = t.number("epsilon", 0.0);
  c.spec.sigma = t.number("sigma");
  c.spec.mu = t.number("mu", 0.0);
  c.spec.j_min = checked_int(t.integer("j_min", -10), "gaussian.j_min");
  c.spec.j_max = checked_int(t.integer("j_max", 10), "gaussian.j_max");
  c.spec.E_GS = t.number("E_GS", 0.0);
  c.trajectory_periods = checked_int(t.integer("trajectory_periods", 10), "gaussian.trajectory_periods");
  c.line_samples = checked_int(t.integer("line_samples", 200), "gaussian.line_samples");
  if (c.trajectory_periods < 1) throw ConfigError("gaussian.trajectory_periods must be positive");
  if (c.line_samples < 2) throw ConfigError("gaussian.line_samples must be at least 2");
  return c;
}

SearchWindow parse_window(const Table& t) {
  t.only({"beta_min", "beta_max", "t_min", "t_max", "grid_k", "winding_threshold", "target_resolution", "seed",
          "initial_samples", "max_bisection_depth", "max_jitter"});
  SearchWindow w;
  w.beta_min = t.number("beta_min");
  w.beta_max = t.number("beta_max");
  w.t_min = t.number("t_min");
  w.t_max = t.number("t_max");
  w.grid_k = checked_int(t.integer("grid_k", w.grid_k), "window.grid_k");
  w.winding_threshold = t.number("winding_threshold", w.winding_threshold);
  w.target_resolution = t.number("target_resolution", w.target_resolution);
  const long long seed = t.integer("seed", 0);
  if (seed < 0) throw ConfigError("window.seed must be non-negative");
  w.seed = static_cast<std::uint64_t>(seed);
  w.initial_samples = checked_int(t.integer("initial_samples", w.initial_samples), "window.initial_samples");
  w.max_bisection_depth =
      checked_int(t.integer("max_bisection_depth", w.max_bisection_depth), "window.max_bisection_depth");
  w.max_jitter = checked_int(t.integer("max_jitter", w.max_jitter), "window.max_jitter");
  try {
    w.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("[window] ") + e.what());
  }
  return w;
}

OutputsConfig parse_outputs(const Table& t) {
  t.only({"directory", "formats", "mirror_beta"});
  OutputsConfig o;
  o.directory = t.string("directory", o.directory);
  if (t.has("formats")) {
    o.csv = o.json = o.svg = false;
    for (const auto& f : t.strings("formats")) {
      if (f == "csv")
        o.csv = true;
      else if (f == "json")
        o.json = true;
      else if (f == "svg")
        o.svg = true;
      else
        throw ConfigError("outputs.formats entries must be csv, json or svg, got \"" + f + "\"");
    }
  }
  o.mirror_beta = t.boolean("mirror_beta", false);
  return o;
}

CompareConfig parse_compare(const Table& t) {
  t.only({"height_mode", "height", "widths", "beta_center"});
  CompareConfig c;
  c.height_mode = t.string("height_mode", c.height_mode);
  if (c.height_mode != "local_spacing" && c.height_mode != "fixed")
    throw ConfigError("compare.height_mode must be \"local_spacing\" or \"fixed\"");
  c.height = t.number("height", 0.0);
  if (c.height_mode == "fixed" && !(c.height > 0.0 && std::isfinite(c.height)))
    throw ConfigError("compare.height must be positive when height_mode = \"fixed\"");
  c.widths = t.numbers("widths");
  if (c.widths.empty()) throw ConfigError("compare.widths must not be empty");
  for (double w : c.widths)
    if (!(w > 0.0 && std::isfinite(w))) throw ConfigError("compare.widths must be positive");
  c.beta_center = t.number("beta_center", 0.0);
  return c;
}

HeatmapConfig parse_heatmap(const Table& t) {
  t.only({"width", "height", "log_floor"});
  HeatmapConfig h;
  h.width = checked_int(t.integer("width", h.width), "heatmap.width");
  h.height = checked_int(t.integer("height", h.height), "heatmap.height");
  h.log_floor = t.number("log_floor", h.log_floor);
  if (h.width < 1 || h.height < 1 || h.width > 8192 || h.height > 8192)
    throw ConfigError("heatmap size must be between 1 and 8192 pixels");
  if (!(h.log_floor < 0.0)) throw ConfigError("heatmap.log_floor must be negative");
  return h;
}

}  // namespace

std::string model_kind_name(ModelKind k) {
  switch (k) {
    case ModelKind::ising: return "ising";
    case ModelKind::ising_nn: return "ising_nn";
    case ModelKind::xy: return "xy";
    case ModelKind::gaussian: return "gaussian";
    case ModelKind::distribution: return "distribution";
  }
  return "unknown";
}

RunConfig RunConfig::from_json(const json& j, const std::string& base_dir) {
  if (!j.is_object()) throw ConfigError("config root must be a table");
  static const std::set<std::string> models = {"ising", "ising_nn", "xy", "gaussian", "distribution"};
  static const std::set<std::string> others = {"window", "outputs", "compare", "heatmap"};
  RunConfig c;
  int model_sections = 0;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    if (models.count(key)) {
      ++model_sections;
      continue;
    }
    if (!others.count(key)) throw ConfigError("unknown section [" + key + "]");
  }
  if (model_sections != 1)
    throw ConfigError("config needs exactly one model section: [ising], [ising_nn], [xy], [gaussian] or [distribution]");

  if (j.contains("ising")) {
    c.kind = ModelKind::ising;
    c.spin = parse_spin(Table(j.at("ising"), "ising"));
  } else if (j.contains("ising_nn")) {
    c.kind = ModelKind::ising_nn;
    c.two_band = parse_two_band(Table(j.at("ising_nn"), "ising_nn"), c.kind);
  } else if (j.contains("xy")) {
    c.kind = ModelKind::xy;
    c.two_band = parse_two_band(Table(j.at("xy"), "xy"), c.kind);
  } else if (j.contains("gaussian")) {
    c.kind = ModelKind::gaussian;
    c.gaussian = parse_gaussian(Table(j.at("gaussian"), "gaussian"));
  } else {
    c.kind = ModelKind::distribution;
    Table t(j.at("distribution"), "distribution");
    t.only({"file"});
    std::filesystem::path p = t.string("file");
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    c.distribution_file = p.lexically_normal().string();
  }

  if (!j.contains("window")) throw ConfigError("missing [window] section");
  c.window = parse_window(Table(j.at("window"), "window"));
  if (j.contains("outputs")) c.outputs = parse_outputs(Table(j.at("outputs"), "outputs"));
  if (j.contains("compare")) c.compare = parse_compare(Table(j.at("compare"), "compare"));
  if (j.contains("heatmap")) c.heatmap = parse_heatmap(Table(j.at("heatmap"), "heatmap"));
  return c;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  json j;
  if (std::filesystem::path(path).extension() == ".json") {
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ConfigError(path + ": " + e.what());
    }
  } else {
    try {
      j = parse_toml(text);
    } catch (const ConfigError& e) {
      throw ConfigError(path + ": " + e.what());
    }
  }
  const std::string base = std::filesystem::path(path).parent_path().string();
  RunConfig c;
  try {
    c = from_json(j, base.empty() ? "." : base);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
  c.source = path;
  return c;
}

}  // namespace lzeros
