#include "lzeros/zero_set.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <tuple>

#include "format.hpp"
#include "json.hpp"

namespace lzeros {

double Rect::diagonal() const { return std::hypot(width(), height()); }

double SearchWindow::resolution() const {
  return target_resolution > 0.0 ? target_resolution : 1e-4 * rect().diagonal();
}

void SearchWindow::validate() const {
  if (!(std::isfinite(beta_min) && std::isfinite(beta_max) && std::isfinite(t_min) &&
        std::isfinite(t_max)))
    throw InvalidArgument("search window must be finite");
  if (!(beta_min < beta_max)) throw InvalidArgument("search window needs beta_min < beta_max");
  if (!(t_min < t_max)) throw InvalidArgument("search window needs t_min < t_max");
  if (grid_k < 2) throw InvalidArgument("search window needs grid_k >= 2");
  if (!(winding_threshold > 0.0 && winding_threshold < 0.5))
    throw InvalidArgument("winding_threshold must lie in (0, 0.5)");
  if (target_resolution < 0.0 || !std::isfinite(target_resolution))
    throw InvalidArgument("target_resolution must be positive");
  if (initial_samples < 2) throw InvalidArgument("initial_samples must be at least 2");
  if (max_bisection_depth < 0) throw InvalidArgument("max_bisection_depth must be >= 0");
  if (max_jitter < 0) throw InvalidArgument("max_jitter must be >= 0");
}

std::string_view provenance_name(Provenance p) {
  switch (p) {
    case Provenance::exact:
      return "exact";
    case Provenance::approximate:
      return "approximate";
    case Provenance::analytic:
      return "analytic";
  }
  return "exact";
}

Provenance parse_provenance(std::string_view s) {
  if (s == "exact") return Provenance::exact;
  if (s == "approximate") return Provenance::approximate;
  if (s == "analytic") return Provenance::analytic;
  throw ConfigError("unknown zero provenance '" + std::string(s) + "'");
}

long ZeroSet::total_multiplicity() const {
  long n = 0;
  for (const auto& z : zeros) n += z.multiplicity;
  return n;
}

long ZeroSet::count_in(const Rect& r) const {
  long n = 0;
  for (const auto& z : zeros)
    if (r.contains(z.z.beta, z.z.t)) n += z.multiplicity;
  return n;
}

void ZeroSet::sort() {
  std::stable_sort(zeros.begin(), zeros.end(), [](const Zero& a, const Zero& b) {
    return std::tie(a.z.t, a.z.beta) < std::tie(b.z.t, b.z.beta);
  });
}

ZeroSet ZeroSet::mirrored_beta() const {
  ZeroSet out = *this;
  for (auto& z : out.zeros) z.z.beta = -z.z.beta;
  if (window) out.window = Rect{-window->beta_max, -window->beta_min, window->t_min, window->t_max};
  return out;
}

void ZeroSet::write_csv(std::ostream& os) const {
  os << "beta,t,multiplicity,provenance,chain_id\n";
  for (const auto& z : zeros) {
    os << detail::fmt_double(z.z.beta) << ',' << detail::fmt_double(z.z.t) << ','
       << z.multiplicity << ',' << provenance_name(z.provenance) << ',';
    if (z.chain_id) os << *z.chain_id;
    os << '\n';
  }
}

ZeroSet ZeroSet::read_csv(std::istream& is) {
  ZeroSet out;
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("zero set CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "beta,t,multiplicity,provenance,chain_id")
    throw ConfigError("zero set CSV has unexpected header '" + line + "'");
  std::size_t row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cols.push_back(cell);
    if (line.back() == ',') cols.emplace_back();
    if (cols.size() != 5)
      throw ConfigError("zero set CSV row " + std::to_string(row) + ": expected 5 columns");
    try {
      Zero z;
      z.z.beta = std::stod(cols[0]);
      z.z.t = std::stod(cols[1]);
      z.multiplicity = std::stoi(cols[2]);
      z.provenance = parse_provenance(cols[3]);
      if (!cols[4].empty()) z.chain_id = std::stol(cols[4]);
      out.zeros.push_back(z);
    } catch (const std::logic_error&) {
      throw ConfigError("zero set CSV row " + std::to_string(row) + ": malformed number");
    }
  }
  return out;
}

std::string ZeroSet::to_json(int indent) const {
  nlohmann::ordered_json j;
  if (window) {
    j["window"] = {{"beta_min", window->beta_min},
                   {"beta_max", window->beta_max},
                   {"t_min", window->t_min},
                   {"t_max", window->t_max}};
  } else {
    j["window"] = nullptr;
  }
  j["seed"] = seed ? nlohmann::ordered_json(*seed) : nlohmann::ordered_json(nullptr);
  j["total_multiplicity"] = total_multiplicity();
  auto arr = nlohmann::ordered_json::array();
  for (const auto& z : zeros) {
    nlohmann::ordered_json e;
    e["beta"] = z.z.beta;
    e["t"] = z.z.t;
    e["multiplicity"] = z.multiplicity;
    e["provenance"] = provenance_name(z.provenance);
    e["chain_id"] = z.chain_id ? nlohmann::ordered_json(*z.chain_id) : nlohmann::ordered_json(nullptr);
    e["multilevel"] = z.multilevel;
    arr.push_back(std::move(e));
  }
  j["zeros"] = std::move(arr);
  return j.dump(indent);
}

BoxGrid BoxGrid::column(double beta_min, double beta_max, double t_min, double t_max,
                        double height, std::string convention) {
  if (!(height > 0.0)) throw InvalidArgument("box height must be positive");
  if (!(beta_min < beta_max) || !(t_min < t_max))
    throw InvalidArgument("box grid range is empty");
  BoxGrid g;
  g.height_convention = std::move(convention);
  const auto n = static_cast<long>(std::floor((t_max - t_min) / height + 1e-9));
  for (long i = 0; i < n; ++i) {
    const double lo = t_min + static_cast<double>(i) * height;
    g.boxes.push_back({Rect{beta_min, beta_max, lo, lo + height}});
  }
  return g;
}

void BoxGrid::validate() const {
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    const auto& a = boxes[i].rect;
    if (!(a.width() > 0.0 && a.height() > 0.0)) throw InvalidArgument("degenerate box");
    for (std::size_t j = i + 1; j < boxes.size(); ++j) {
      const auto& b = boxes[j].rect;
      const bool overlap = a.beta_min < b.beta_max && b.beta_min < a.beta_max &&
                           a.t_min < b.t_max && b.t_min < a.t_max;
      if (overlap) throw InvalidArgument("boxes overlap");
    }
  }
}

std::vector<DeltaEta> delta_eta(const ZeroSet& exact, const ZeroSet& approx, const BoxGrid& grid) {
  std::vector<DeltaEta> out;
  out.reserve(grid.boxes.size());
  for (const auto& box : grid.boxes) {
    DeltaEta d;
    d.box_center_t = 0.5 * (box.rect.t_min + box.rect.t_max);
    d.exact_count = exact.count_in(box.rect);
    d.approx_count = approx.count_in(box.rect);
    if (d.exact_count > 0)
      d.value = std::abs(static_cast<double>(d.exact_count - d.approx_count)) /
                static_cast<double>(d.exact_count);
    out.push_back(d);
  }
  return out;
}

}  // namespace lzeros
