#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "lzeros/energy_distribution.hpp"
#include "lzeros/zero_set.hpp"

namespace lzeros {

struct HeatmapOptions {
  int width = 480;
  int height = 360;
  double log_floor = -12.0;
  // Draw (-beta, t): the beta axis runs from beta_max on the left to beta_min.
  bool mirror_beta = false;
};

// log|L(z)/L(beta)| at a point of the plane.
using LogModulusField = std::function<double(ComplexTime)>;

// Monotone dark-to-light color map on s in [0, 1].
std::array<std::uint8_t, 3> heat_color(double s);

// Raster of heat_color(value / log_floor mapped to [0, 1]) at pixel centers.
// Row 0 is t_max. Output is packed RGB.
std::vector<std::uint8_t> render_raster(const LogModulusField& field, const Rect& window,
                                        const HeatmapOptions& options);

std::string encode_png(const std::vector<std::uint8_t>& rgb, int width, int height);
std::string base64_encode(std::string_view bytes);

// SVG with the raster embedded as a PNG and every zero drawn as a marker:
// exact as open circles, approximate as crosses, analytic as dots.
std::string render_heatmap_svg(const LogModulusField& field, const Rect& window,
                               const std::vector<const ZeroSet*>& zero_sets,
                               const HeatmapOptions& options);

}  // namespace lzeros
