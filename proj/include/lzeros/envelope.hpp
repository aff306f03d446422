#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "lzeros/energy_distribution.hpp"
#include "lzeros/zero_set.hpp"

namespace lzeros {

// Adjacent pair of envelope members. beta is the crossing point of the two
// terms and period = 2 pi / |E_b - E_a| the spacing of their zero chain.
struct Segment {
  std::size_t a = 0;
  std::size_t b = 0;
  double beta = 0.0;
  double period = 0.0;
  // Index into Envelope::groups, or -1 for a strict two-level segment.
  long group = -1;
};

// Run of three or more collinear members in the (E, ln k) plane.
struct MultilevelGroup {
  std::vector<std::size_t> levels;  // indices into the distribution
  double kappa = 1.0;               // k_first / k_last
  double kappa0 = 0.0;
  double beta = 0.0;                // crossing point of the edge pair
  double period = 0.0;              // 2 pi / (E_last - E_first)
  bool equidistant = false;
  double spacing = 0.0;             // level spacing when equidistant
};

struct Envelope {
  std::vector<std::size_t> members;
  std::vector<Segment> segments;
  std::vector<MultilevelGroup> groups;
  // Member data copied from the distribution so the envelope stands alone.
  std::vector<double> member_energies;
  std::vector<double> member_populations;

  std::string to_json(int indent = 2) const;
};

struct EnvelopeOptions {
  // Distance in ln k below which a point counts as lying on a chord.
  double collinear_tolerance = 1e-9;
  // Relative spacing deviation accepted as equidistant.
  double equidistant_tolerance = 1e-6;
};

// Upper convex hull of {(E_j, ln k_j)}. Points on a hull edge (within
// tolerance) are kept and form multilevel groups.
Envelope compute_envelope(const EnergyDistribution& dist, const EnvelopeOptions& options = {});

// Envelope from a given ordered member list, e.g. a constructive one.
Envelope envelope_from_members(const EnergyDistribution& dist, std::vector<std::size_t> members,
                               const EnvelopeOptions& options = {});

// Zeros of the two-level chains and multilevel groups that fall in the window.
ZeroSet approximate_zeros(const Envelope& env, const SearchWindow& window);

struct EnvelopeDiagnostics {
  double ratio_R = 1.0;
  std::size_t max_index = 0;  // distribution index of the largest member population
  bool multilevel_at_axis = false;
};

EnvelopeDiagnostics diagnostics(const Envelope& env);

// Every segment has sign(k_b - k_a) == sign(beta).
bool monotonicity_check(const Envelope& env);

}  // namespace lzeros
