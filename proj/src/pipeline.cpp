#include "lzeros/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "lzeros/amplitude.hpp"
#include "lzeros/errors.hpp"
#include "lzeros/gaussian_model.hpp"
#include "lzeros/heatmap.hpp"
#include "lzeros/simd/term_sums.hpp"
#include "lzeros/spin_models.hpp"
#include "lzeros/two_band.hpp"
#include "lzeros/zero_finder.hpp"
#include "format.hpp"

namespace lzeros {
namespace {

using ojson = nlohmann::ordered_json;
constexpr double kPi = std::numbers::pi;
constexpr const char* kVersion = "0.1.0";

// Everything the commands need to know about the amplitude of one model.
struct Source {
  std::optional<EnergyDistribution> dist;
  AmplitudeFunction f;
  LogModulusField field;
  std::optional<QuenchResult> quench;
  std::optional<TwoBandQuench> modes;
  std::optional<GaussianSpec> gaussian;
  std::optional<Envelope> env;
};

class Stopwatch {
 public:
  Stopwatch(RunReport& report, std::string stage) : report_(report), stage_(std::move(stage)) {}
  ~Stopwatch() {
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start_;
    report_.timing.emplace_back(stage_, dt.count());
  }

 private:
  RunReport& report_;
  std::string stage_;
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

LogModulusField function_field(AmplitudeFunction f) {
  return [f](ComplexTime z) { return f(z.as_complex()).log_modulus - f({z.beta, 0.0}).log_modulus; };
}

Source build_source(const RunConfig& c, RunReport& report) {
  Stopwatch sw(report, "model");
  Source s;
  switch (c.kind) {
    case ModelKind::ising: {
      const auto& m = *c.spin;
      IsingSpec initial{m.N, m.h_i, m.alpha, m.sector, m.units};
      IsingSpec final_spec = initial;
      final_spec.h = m.h_f;
      s.quench = quench(initial, final_spec);
      s.dist = s.quench->distribution();
      break;
    }
    case ModelKind::ising_nn:
    case ModelKind::xy: {
      const auto& m = *c.two_band;
      s.modes = c.kind == ModelKind::ising_nn ? ising_modes(m.N, m.h_i, m.h_f, m.energy_scale)
                                              : xy_modes(m.N, m.gamma_i, m.h_i, m.gamma_f, m.h_f);
      s.f = factorized_function(*s.modes);
      const TwoBandQuench q = *s.modes;
      s.field = [q](ComplexTime z) {
        return factorized_amplitude(q, z).log_modulus - factorized_amplitude(q, {z.beta, 0.0}).log_modulus;
      };
      if (s.modes->modes.size() <= static_cast<std::size_t>(kSubsetModeCap)) {
        s.dist = bcs_populations(*s.modes);
        s.env = bcs_envelope(*s.modes);
      }
      break;
    }
    case ModelKind::gaussian: {
      s.gaussian = c.gaussian->spec;
      s.gaussian->validate();
      s.dist = build_distribution(*s.gaussian);
      s.f = bounded_function(*s.gaussian);
      s.field = function_field(s.f);
      break;
    }
    case ModelKind::distribution: {
      std::ifstream in(*c.distribution_file);
      if (!in) throw ConfigError("cannot open distribution file " + *c.distribution_file);
      s.dist = EnergyDistribution::read_csv(in);
      break;
    }
  }
  if (s.dist && !s.f) {
    s.f = amplitude_function(*s.dist);
    const EnergyDistribution d = *s.dist;
    s.field = [d](ComplexTime z) { return evaluate_normalized(d, z).log_modulus; };
  }
  return s;
}

void ensure_envelope(Source& s, RunReport& report) {
  if (s.env || !s.dist) return;
  Stopwatch sw(report, "envelope");
  s.env = compute_envelope(*s.dist);
}

class Output {
 public:
  Output(const RunConfig& c, RunReport& report) : config_(c), report_(report) {
    dir_ = c.outputs.directory;
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw ConfigError("cannot create output directory " + dir_.string() + ": " + ec.message());
    report_.directory = dir_.string();
  }

  void write(const std::string& name, const std::string& content, bool record = true) {
    const auto path = dir_ / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << content;
    out.close();
    if (!out) throw ConfigError("failed writing " + path.string());
    if (record) report_.files.push_back({name, content.size(), fnv1a64_hex(content)});
  }

  void zero_set(const std::string& base, const ZeroSet& zs) {
    if (config_.outputs.csv) {
      std::ostringstream os;
      zs.write_csv(os);
      write(base + ".csv", os.str());
    }
    if (config_.outputs.json) write(base + ".json", zs.to_json() + "\n");
  }

  bool csv() const { return config_.outputs.csv; }
  bool json() const { return config_.outputs.json; }
  bool svg() const { return config_.outputs.svg; }

 private:
  const RunConfig& config_;
  RunReport& report_;
  std::filesystem::path dir_;
};

ojson diagnostics_json(const Source& s) {
  ojson d;
  if (s.dist) {
    d["levels"] = s.dist->size();
    d["ipr"] = ipr(*s.dist);
    d["mean_energy"] = s.dist->mean_energy();
    if (s.dist->size() >= 2) {
      const auto strip = edge_strip(*s.dist);
      d["edge_strip"] = {{"beta_low", strip.beta_low}, {"beta_high", strip.beta_high}};
    } else {
      d["edge_strip"] = nullptr;
    }
  }
  if (s.quench) {
    d["initial_energy"] = s.quench->initial_energy;
    const auto shift = mean_energy_shift(*s.quench);
    d["mean_energy_shift"] = {{"predicted", shift.predicted}, {"actual", shift.actual}};
    d["esqpt_energy"] = s.quench->esqpt_energy ? ojson(*s.quench->esqpt_energy) : ojson(nullptr);
    // The Gaussian picture is meant for the collective model only.
    if (s.quench->spec_initial.collective()) {
      try {
        const auto fit = fit_gaussian(*s.dist);
        d["gaussian_fit"] = {{"delta", fit.spec.delta},
                             {"epsilon", fit.spec.epsilon},
                             {"sigma", fit.spec.sigma},
                             {"mu", fit.spec.mu},
                             {"j_min", fit.spec.j_min},
                             {"j_max", fit.spec.j_max},
                             {"population_rms", fit.population_rms},
                             {"energy_rms", fit.energy_rms}};
      } catch (const NumericalError&) {
        d["gaussian_fit"] = nullptr;
      }
    }
  }
  if (s.env) {
    const auto diag = diagnostics(*s.env);
    d["envelope_members"] = s.env->members.size();
    d["envelope_segments"] = s.env->segments.size();
    d["multilevel_groups"] = s.env->groups.size();
    d["ratio_R"] = diag.ratio_R;
    d["multilevel_at_axis"] = diag.multilevel_at_axis;
    d["monotonic"] = monotonicity_check(*s.env);
    d["trivial_envelope"] = s.env->members.size() < 2;
  }
  if (s.modes) d["modes"] = s.modes->modes.size();
  return d;
}

void record_counts(RunReport& r) {
  auto& d = r.diagnostics;
  if (r.exact) d["exact_zeros"] = r.exact->total_multiplicity();
  if (r.approximate) {
    d["approximate_zeros"] = r.approximate->total_multiplicity();
    bool negative = true;
    for (const auto& z : r.approximate->zeros) negative = negative && z.z.beta < 0.0;
    d["approximate_all_negative_beta"] = negative;
  }
  if (r.analytic) d["analytic_zeros"] = r.analytic->total_multiplicity();
}

void run_exact(const RunConfig& c, Source& s, RunReport& r) {
  Stopwatch sw(r, "exact_zeros");
  r.exact = find_zeros(s.f, c.window);
  r.exact->seed = c.window.seed;
}

void run_approximate(const RunConfig& c, Source& s, RunReport& r) {
  ensure_envelope(s, r);
  if (!s.env) return;
  r.envelope = *s.env;
  Stopwatch sw(r, "approximate_zeros");
  r.approximate = approximate_zeros(*s.env, c.window);
}

void run_analytic(const RunConfig& c, Source& s, RunReport& r) {
  Stopwatch sw(r, "analytic_zeros");
  if (s.modes) r.analytic = bcs_zeros(*s.modes, c.window);
  if (s.gaussian) r.analytic = unbounded_zeros(*s.gaussian, c.window);
}

double local_spacing_height(const Envelope& env) {
  if (env.segments.empty()) throw InvalidArgument("height_mode local_spacing needs an envelope with two or more members");
  const std::size_t top = diagnostics(env).max_index;
  for (const auto& seg : env.segments)
    if (seg.a == top) return seg.period;
  for (const auto& seg : env.segments)
    if (seg.b == top) return seg.period;
  return env.segments.front().period;
}

void run_delta_eta(const RunConfig& c, Source& s, RunReport& r) {
  CompareConfig cmp;
  if (c.compare) {
    cmp = *c.compare;
  } else {
    cmp.widths = {c.window.beta_max - c.window.beta_min};
    cmp.beta_center = 0.5 * (c.window.beta_min + c.window.beta_max);
  }
  double height = cmp.height;
  if (cmp.height_mode == "local_spacing") {
    ensure_envelope(s, r);
    if (!s.env) throw InvalidArgument("height_mode local_spacing needs an energy distribution");
    height = local_spacing_height(*s.env);
  }
  for (double w : cmp.widths) {
    const double lo = cmp.beta_center - 0.5 * w, hi = cmp.beta_center + 0.5 * w;
    if (lo < c.window.beta_min - 1e-12 || hi > c.window.beta_max + 1e-12)
      throw InvalidArgument("compare box of width " + detail::fmt_double(w) + " leaves the search window");
    const auto grid = BoxGrid::column(lo, hi, c.window.t_min, c.window.t_max, height, cmp.height_mode);
    for (const auto& e : delta_eta(*r.exact, *r.approximate, grid)) {
      DeltaEtaRow row;
      row.width = w;
      row.box_height = height;
      row.entry = e;
      row.divergent = !e.value || *e.value > 1.0;
      r.delta_eta.push_back(row);
    }
  }
}

std::string delta_eta_csv(const std::vector<DeltaEtaRow>& rows) {
  std::ostringstream os;
  os << "width,box_height,box_center_t,exact_count,approx_count,delta_eta,divergent\n";
  for (const auto& row : rows) {
    os << detail::fmt_double(row.width) << ',' << detail::fmt_double(row.box_height) << ','
       << detail::fmt_double(row.entry.box_center_t) << ',' << row.entry.exact_count << ','
       << row.entry.approx_count << ',' << (row.entry.value ? detail::fmt_double(*row.entry.value) : "") << ','
       << (row.divergent ? 1 : 0) << '\n';
  }
  return os.str();
}

std::string polyline_csv(const std::vector<Polyline>& lines) {
  std::ostringstream os;
  os << "x,y,id\n";
  for (const auto& p : lines)
    for (const auto& pt : p.points)
      os << detail::fmt_double(pt.beta) << ',' << detail::fmt_double(pt.t) << ',' << p.id << '\n';
  return os.str();
}

void write_common(Output& out, const Source& s, const RunReport& r) {
  if (s.dist && out.csv()) {
    std::ostringstream os;
    s.dist->write_csv(os);
    out.write("distribution.csv", os.str());
  }
  if (s.quench && out.json()) out.write("quench.json", s.quench->to_json() + "\n");
  if (s.modes && out.csv()) {
    std::ostringstream os;
    s.modes->write_modes_csv(os);
    out.write("modes.csv", os.str());
  }
  if (r.envelope && out.json()) out.write("envelope.json", r.envelope->to_json() + "\n");
  if (r.exact) out.zero_set("zeros_exact", *r.exact);
  if (r.approximate) out.zero_set("zeros_approximate", *r.approximate);
  if (r.analytic) out.zero_set("zeros_analytic", *r.analytic);
  if (!r.delta_eta.empty() && out.csv()) out.write("delta_eta.csv", delta_eta_csv(r.delta_eta));
}

void write_svg(const RunConfig& c, const Source& s, RunReport& r, Output& out) {
  Stopwatch sw(r, "heatmap");
  HeatmapOptions opt;
  opt.width = c.heatmap.width;
  opt.height = c.heatmap.height;
  opt.log_floor = c.heatmap.log_floor;
  opt.mirror_beta = c.outputs.mirror_beta;
  std::vector<const ZeroSet*> sets;
  if (r.exact) sets.push_back(&*r.exact);
  if (r.approximate) sets.push_back(&*r.approximate);
  if (r.analytic) sets.push_back(&*r.analytic);
  out.write("heatmap.svg", render_heatmap_svg(s.field, c.window.rect(), sets, opt));
}

void finish(const Source& s, RunReport& r, Output& out) {
  const ojson d = diagnostics_json(s);
  for (auto it = d.begin(); it != d.end(); ++it) r.diagnostics[it.key()] = it.value();
  record_counts(r);
  write_common(out, s, r);
  out.write("report.json", r.to_json().dump(2) + "\n", false);
  ojson t;
  for (const auto& [stage, seconds] : r.timing) t[stage] = seconds;
  t["isa"] = std::string(simd::isa_name(simd::active_isa()));
  out.write("timing.json", t.dump(2) + "\n", false);
}

RunReport start(Command cmd) {
  RunReport r;
  r.command = std::string(command_name(cmd));
  return r;
}

}  // namespace

std::string_view command_name(Command c) {
  switch (c) {
    case Command::quench: return "quench";
    case Command::envelope: return "envelope";
    case Command::zeros: return "zeros";
    case Command::compare: return "compare";
    case Command::gaussian: return "gaussian";
    case Command::twoband: return "twoband";
    case Command::heatmap: return "heatmap";
  }
  return "unknown";
}

Command parse_command(std::string_view name) {
  for (Command c : {Command::quench, Command::envelope, Command::zeros, Command::compare, Command::gaussian,
                    Command::twoband, Command::heatmap})
    if (command_name(c) == name) return c;
  throw ConfigError("unknown command '" + std::string(name) + "'");
}

void apply_options(RunConfig& config, const RunOptions& options) {
  if (options.out_dir) config.outputs.directory = *options.out_dir;
  if (options.seed) config.window.seed = *options.seed;
  if (options.mirror_beta) config.outputs.mirror_beta = true;
}

std::string fnv1a64_hex(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ojson RunReport::to_json() const {
  ojson j;
  j["command"] = command;
  j["version"] = kVersion;
  j["directory"] = directory;
  j["diagnostics"] = diagnostics;
  auto rows = ojson::array();
  for (const auto& row : delta_eta) {
    rows.push_back({{"width", row.width},
                    {"box_height", row.box_height},
                    {"box_center_t", row.entry.box_center_t},
                    {"exact_count", row.entry.exact_count},
                    {"approx_count", row.entry.approx_count},
                    {"delta_eta", row.entry.value ? ojson(*row.entry.value) : ojson(nullptr)},
                    {"divergent", row.divergent}});
  }
  j["delta_eta"] = rows;
  auto files_json = ojson::array();
  for (const auto& f : files) files_json.push_back({{"name", f.name}, {"bytes", f.bytes}, {"fnv1a64", f.fnv1a64}});
  j["files"] = files_json;
  return j;
}

RunReport cmd_quench(const RunConfig& c) {
  RunReport r = start(Command::quench);
  Source s = build_source(c, r);
  Output out(c, r);
  run_approximate(c, s, r);
  run_exact(c, s, r);
  if (s.modes || s.gaussian) run_analytic(c, s, r);
  if (c.compare && r.approximate) run_delta_eta(c, s, r);
  if (out.svg()) write_svg(c, s, r, out);
  finish(s, r, out);
  return r;
}

RunReport cmd_envelope(const RunConfig& c) {
  RunReport r = start(Command::envelope);
  Source s = build_source(c, r);
  Output out(c, r);
  run_approximate(c, s, r);
  if (!r.envelope) throw InvalidArgument("envelope needs an energy distribution (too many modes for the subset sum)");
  finish(s, r, out);
  return r;
}

RunReport cmd_zeros(const RunConfig& c) {
  RunReport r = start(Command::zeros);
  Source s = build_source(c, r);
  Output out(c, r);
  run_exact(c, s, r);
  finish(s, r, out);
  return r;
}

RunReport cmd_compare(const RunConfig& c) {
  RunReport r = start(Command::compare);
  Source s = build_source(c, r);
  Output out(c, r);
  run_approximate(c, s, r);
  if (!r.approximate) throw InvalidArgument("compare needs an energy distribution for the envelope");
  run_exact(c, s, r);
  run_delta_eta(c, s, r);
  if (out.svg()) write_svg(c, s, r, out);
  finish(s, r, out);
  return r;
}

RunReport cmd_gaussian(const RunConfig& c) {
  if (c.kind != ModelKind::gaussian) throw ConfigError("the gaussian command needs a [gaussian] model section");
  RunReport r = start(Command::gaussian);
  Source s = build_source(c, r);
  Output out(c, r);
  run_approximate(c, s, r);
  run_exact(c, s, r);
  run_analytic(c, s, r);

  const GaussianSpec& spec = *s.gaussian;
  const GaussianConfig& g = *c.gaussian;
  {
    Stopwatch sw(r, "zero_lines");
    // Lines whose t range meets the window.
    const CenteredSpec cs = center_spec(spec);
    double dmin = std::numeric_limits<double>::infinity(), dmax = 0.0;
    for (int j = cs.spec.j_min; j <= cs.spec.j_max + 1; ++j) {
      const double d = cs.spec.spacing(j - 1.0);
      if (d > 0.0) {
        dmin = std::min(dmin, d);
        dmax = std::max(dmax, d);
      }
    }
    const long n_lo = static_cast<long>(std::floor(c.window.t_min * dmin / (2.0 * kPi) - 0.5));
    const long n_hi = static_cast<long>(std::ceil(c.window.t_max * dmax / (2.0 * kPi)));
    const auto lines = zero_lines(spec, n_lo, n_hi, cs.spec.j_min, cs.spec.j_max + 1.0, g.line_samples);
    if (out.csv()) out.write("zero_lines.csv", polyline_csv(lines));
  }
  if (spec.epsilon != 0.0) {
    Stopwatch sw(r, "trajectories");
    GaussianSpec flat = spec;
    flat.epsilon = 0.0;
    SearchWindow first = c.window;
    first.t_min = 0.0;
    first.t_max = 2.0 * kPi / spec.delta;
    const ZeroSet seeds_set = find_zeros(bounded_function(flat), first);
    std::vector<ComplexTime> seeds;
    for (const auto& z : seeds_set.zeros) seeds.push_back(z.z);
    const auto traj = zero_trajectories(spec, seeds, 0, g.trajectory_periods - 1);
    if (out.csv()) out.write("trajectories.csv", polyline_csv(traj));
    r.diagnostics["trajectory_seeds"] = seeds.size();
  }
  if (out.svg()) write_svg(c, s, r, out);
  finish(s, r, out);
  return r;
}

RunReport cmd_twoband(const RunConfig& c) {
  if (c.kind != ModelKind::ising_nn && c.kind != ModelKind::xy)
    throw ConfigError("the twoband command needs an [ising_nn] or [xy] model section");
  RunReport r = start(Command::twoband);
  Source s = build_source(c, r);
  Output out(c, r);
  run_approximate(c, s, r);
  run_exact(c, s, r);
  run_analytic(c, s, r);
  if (out.svg()) write_svg(c, s, r, out);
  finish(s, r, out);
  return r;
}

RunReport cmd_heatmap(const RunConfig& c) {
  RunReport r = start(Command::heatmap);
  Source s = build_source(c, r);
  Output out(c, r);
  run_exact(c, s, r);
  write_svg(c, s, r, out);
  finish(s, r, out);
  return r;
}

RunReport run_command(Command command, const RunConfig& config) {
  const std::string where = config.source.empty() ? std::string("config") : config.source;
  try {
    switch (command) {
      case Command::quench: return cmd_quench(config);
      case Command::envelope: return cmd_envelope(config);
      case Command::zeros: return cmd_zeros(config);
      case Command::compare: return cmd_compare(config);
      case Command::gaussian: return cmd_gaussian(config);
      case Command::twoband: return cmd_twoband(config);
      case Command::heatmap: return cmd_heatmap(config);
    }
  } catch (const ConfigError& e) {
    throw ConfigError(where + ": " + e.what());
  } catch (const InvalidArgument& e) {
    throw ConfigError(where + ": " + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError(where + ": " + e.what());
  }
  throw ConfigError("unknown command");
}

}  // namespace lzeros
