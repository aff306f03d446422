#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lzeros/energy_distribution.hpp"
#include "lzeros/errors.hpp"

namespace lzeros {

// Rectangular region of the complex-time plane plus the settings of the
// subdivision search.
struct SearchWindow {
  double beta_min = -1.0;
  double beta_max = 1.0;
  double t_min = 0.0;
  double t_max = 1.0;
  int grid_k = 4;
  double winding_threshold = 0.2;
  // Final cell diagonal. Zero selects 1e-4 times the window diagonal.
  double target_resolution = 0.0;
  std::uint64_t seed = 0;
  int initial_samples = 64;
  int max_bisection_depth = 20;
  int max_jitter = 5;

  Rect rect() const { return {beta_min, beta_max, t_min, t_max}; }
  double resolution() const;
  void validate() const;

  static SearchWindow from_rect(const Rect& r) {
    SearchWindow w;
    w.beta_min = r.beta_min;
    w.beta_max = r.beta_max;
    w.t_min = r.t_min;
    w.t_max = r.t_max;
    return w;
  }
};

enum class Provenance { exact, approximate, analytic };

std::string_view provenance_name(Provenance p);
Provenance parse_provenance(std::string_view s);

struct Zero {
  ComplexTime z;
  int multiplicity = 1;
  Provenance provenance = Provenance::exact;
  std::optional<long> chain_id;
  // Placed by the edge-pair rule of a non-equidistant multilevel group;
  // the position is indicative only.
  bool multilevel = false;
};

class ZeroSet {
 public:
  std::vector<Zero> zeros;
  // Region the set was produced for (after any boundary jitter).
  std::optional<Rect> window;
  std::optional<std::uint64_t> seed;

  std::size_t size() const { return zeros.size(); }
  bool empty() const { return zeros.empty(); }
  long total_multiplicity() const;
  long count_in(const Rect& r) const;

  // Sort by (t, beta).
  void sort();
  ZeroSet mirrored_beta() const;

  void write_csv(std::ostream& os) const;
  static ZeroSet read_csv(std::istream& is);
  // JSON mirror: window, seed and the zero list.
  std::string to_json(int indent = 2) const;
};

struct Box {
  Rect rect;
};

struct BoxGrid {
  std::vector<Box> boxes;
  std::string height_convention = "fixed";

  // Stack boxes of the given height and beta range along t.
  static BoxGrid column(double beta_min, double beta_max, double t_min, double t_max,
                        double height, std::string convention = "fixed");
  void validate() const;
};

struct DeltaEta {
  double box_center_t = 0.0;
  long exact_count = 0;
  long approx_count = 0;
  // |eta_e - eta_a| / eta_e; nullopt when the box has no exact zero.
  std::optional<double> value;
};

std::vector<DeltaEta> delta_eta(const ZeroSet& exact, const ZeroSet& approx, const BoxGrid& grid);

}  // namespace lzeros
