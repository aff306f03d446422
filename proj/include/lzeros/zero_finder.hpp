#pragma once

#include <utility>

#include "lzeros/amplitude.hpp"
#include "lzeros/energy_distribution.hpp"
#include "lzeros/zero_set.hpp"

namespace lzeros {

struct ContourOptions {
  int initial_samples = 64;
  int max_bisection_depth = 20;
};

// Winding number of f around the counterclockwise boundary of rect.
// Throws NonConvergent when the phase cannot be tracked (a zero on or very
// close to the contour).
double winding_number(const AmplitudeFunction& f, const Rect& rect,
                      const ContourOptions& options = {});
double winding_number(const EnergyDistribution& dist, const Rect& rect,
                      const ContourOptions& options = {});

// All zeros inside the window by recursive k x k subdivision.
ZeroSet find_zeros(const AmplitudeFunction& f, const SearchWindow& window);
ZeroSet find_zeros(const EnergyDistribution& dist, const SearchWindow& window);

struct EdgeStrip {
  double beta_low = 0.0;
  double beta_high = 0.0;
};

// Strip outside of which one edge term outweighs all the others combined.
EdgeStrip edge_strip(const EnergyDistribution& dist);

}  // namespace lzeros
