#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lzeros/gaussian_model.hpp"
#include "lzeros/spin_models.hpp"
#include "lzeros/two_band.hpp"
#include "lzeros/zero_set.hpp"

namespace lzeros {

enum class ModelKind { ising, ising_nn, xy, gaussian, distribution };

std::string model_kind_name(ModelKind k);

// Exact diagonalization quench h_i -> h_f of the Kac-normalized chain.
struct SpinModelConfig {
  int N = 2;
  double alpha = 0.0;
  double h_i = 0.0;
  double h_f = 0.0;
  Sector sector = Sector::even_parity;
  Units units = Units::per_site;
};

// Free-fermion quench of the nearest-neighbour Ising or XY chain.
struct TwoBandConfig {
  int N = 2;
  double h_i = 0.0;
  double h_f = 0.0;
  double gamma_i = 1.0;
  double gamma_f = 1.0;
  double energy_scale = kIsingEnergyScale;
};

struct GaussianConfig {
  GaussianSpec spec;
  // Periods covered by the first-order trajectories (epsilon != 0 only).
  int trajectory_periods = 10;
  int line_samples = 200;
};

struct OutputsConfig {
  std::string directory = "out";
  bool csv = true;
  bool json = true;
  bool svg = false;
  bool mirror_beta = false;
};

struct CompareConfig {
  // "local_spacing": height 2 pi / Delta next to the largest envelope member.
  // "fixed": height taken from `height`.
  std::string height_mode = "local_spacing";
  double height = 0.0;
  // Box widths in beta, boxes centred on beta_center.
  std::vector<double> widths;
  double beta_center = 0.0;
};

struct HeatmapConfig {
  int width = 480;
  int height = 360;
  // log|L| values at or below this map to the darkest color.
  double log_floor = -12.0;
};

struct RunConfig {
  ModelKind kind = ModelKind::distribution;
  std::optional<SpinModelConfig> spin;
  std::optional<TwoBandConfig> two_band;
  std::optional<GaussianConfig> gaussian;
  // Path of an `energy,population` CSV, resolved against the config file.
  std::optional<std::string> distribution_file;

  SearchWindow window;
  OutputsConfig outputs;
  std::optional<CompareConfig> compare;
  HeatmapConfig heatmap;

  std::string source;  // config path, used as error context

  // `base_dir` resolves relative file names inside the config.
  static RunConfig from_json(const nlohmann::json& j, const std::string& base_dir = ".");
  // TOML unless the file name ends in .json.
  static RunConfig load(const std::string& path);
};

}  // namespace lzeros
