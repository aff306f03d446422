#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "lzeros/energy_distribution.hpp"

namespace testing_support {

using cplx = std::complex<double>;

inline lzeros::EnergyDistribution make_dist(const std::vector<std::pair<double, double>>& pairs) {
  std::vector<lzeros::Level> levels;
  for (const auto& [e, k] : pairs) levels.push_back({e, k});
  return lzeros::EnergyDistribution::from_levels(levels);
}

// Random distribution with d + 1 levels, energies spread over [-span/2, span/2],
// log populations uniform in [-log_range, 0].
inline lzeros::EnergyDistribution random_dist(std::mt19937_64& rng, int levels, double span = 4.0,
                                              double log_range = 6.0) {
  std::uniform_real_distribution<double> ue(-0.5 * span, 0.5 * span), ul(-log_range, 0.0);
  std::vector<lzeros::Level> v;
  for (int i = 0; i < levels; ++i) v.push_back({ue(rng), std::exp(ul(rng))});
  return lzeros::EnergyDistribution::from_levels(v);
}

// Plain complex sum of k_j exp(-E_j z), no scaling.
inline cplx naive_sum(const lzeros::EnergyDistribution& d, cplx z) {
  cplx s = 0.0;
  for (std::size_t j = 0; j < d.size(); ++j) s += d.population(j) * std::exp(-d.energy(j) * z);
  return s;
}

}  // namespace testing_support
