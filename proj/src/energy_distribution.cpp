#include "lzeros/energy_distribution.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "format.hpp"
#include "lzeros/errors.hpp"

namespace lzeros {

double AmplitudeValue::modulus() const { return std::exp(log_modulus); }

std::complex<double> AmplitudeValue::as_complex() const {
  return std::polar(std::exp(log_modulus), phase);
}

EnergyDistribution EnergyDistribution::from_levels(std::vector<Level> levels,
                                                   const DistributionOptions& options,
                                                   std::string label) {
  if (levels.empty()) throw InvalidArgument("energy distribution needs at least one level");
  for (const auto& l : levels) {
    if (!std::isfinite(l.energy) || !std::isfinite(l.population))
      throw InvalidArgument("energy distribution contains a non-finite value");
    if (l.population < 0.0) throw InvalidArgument("negative population in energy distribution");
  }

  EnergyDistribution out;
  out.label_ = std::move(label);
  out.metadata_.input_levels = levels.size();

  std::stable_sort(levels.begin(), levels.end(),
                   [](const Level& a, const Level& b) { return a.energy < b.energy; });

  const double span = levels.back().energy - levels.front().energy;
  const double merge_gap = options.merge_tolerance * span;

  // Merge clusters of (nearly) degenerate levels; the merged energy is the
  // population-weighted mean of the cluster.
  std::vector<Level> merged;
  merged.reserve(levels.size());
  std::size_t i = 0;
  while (i < levels.size()) {
    std::size_t j = i + 1;
    double weight = levels[i].population;
    double moment = levels[i].population * levels[i].energy;
    double plain = levels[i].energy;
    while (j < levels.size() && levels[j].energy - levels[j - 1].energy <= merge_gap) {
      weight += levels[j].population;
      moment += levels[j].population * levels[j].energy;
      plain += levels[j].energy;
      ++j;
    }
    const std::size_t n = j - i;
    const double energy = weight > 0.0 ? moment / weight : plain / static_cast<double>(n);
    merged.push_back({energy, weight});
    out.metadata_.merged_levels += n - 1;
    i = j;
  }

  double total = 0.0;
  for (const auto& l : merged) total += l.population;
  if (!(total > 0.0)) throw InvalidArgument("energy distribution has no populated level");

  std::vector<Level> kept;
  kept.reserve(merged.size());
  for (const auto& l : merged) {
    const double p = l.population / total;
    if (p < options.population_floor || p == 0.0) {
      ++out.metadata_.dropped_levels;
      out.metadata_.dropped_mass += p;
    } else {
      kept.push_back({l.energy, p});
    }
  }
  if (kept.empty()) throw InvalidArgument("all populations fall below the population floor");

  double kept_total = 0.0;
  for (const auto& l : kept) kept_total += l.population;

  out.energies_.reserve(kept.size());
  out.populations_.reserve(kept.size());
  out.log_populations_.reserve(kept.size());
  for (const auto& l : kept) {
    const double p = l.population / kept_total;
    out.energies_.push_back(l.energy);
    out.populations_.push_back(p);
    out.log_populations_.push_back(std::log(p));
  }
  return out;
}

EnergyDistribution EnergyDistribution::from_arrays(std::span<const double> energies,
                                                   std::span<const double> populations,
                                                   const DistributionOptions& options,
                                                   std::string label) {
  if (energies.size() != populations.size())
    throw InvalidArgument("energy and population arrays differ in length");
  std::vector<Level> levels(energies.size());
  for (std::size_t j = 0; j < energies.size(); ++j) levels[j] = {energies[j], populations[j]};
  return from_levels(std::move(levels), options, std::move(label));
}

double EnergyDistribution::mean_energy() const {
  double m = 0.0;
  for (std::size_t j = 0; j < size(); ++j) m += populations_[j] * energies_[j];
  return m;
}

std::size_t EnergyDistribution::find_energy(double e, double tol) const {
  auto it = std::lower_bound(energies_.begin(), energies_.end(), e - tol);
  if (it != energies_.end() && std::abs(*it - e) <= tol)
    return static_cast<std::size_t>(it - energies_.begin());
  return size();
}

void EnergyDistribution::write_csv(std::ostream& os) const {
  os << "energy,population\n";
  for (std::size_t j = 0; j < size(); ++j)
    os << detail::fmt_double(energies_[j]) << ',' << detail::fmt_double(populations_[j]) << '\n';
}

EnergyDistribution EnergyDistribution::read_csv(std::istream& is,
                                                const DistributionOptions& options) {
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("empty energy distribution CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "energy,population")
    throw ConfigError("energy distribution CSV must start with header 'energy,population'");
  std::vector<Level> levels;
  std::size_t row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw ConfigError("row " + std::to_string(row) + ": expected two comma-separated values");
    try {
      std::size_t used = 0;
      const std::string a = line.substr(0, comma);
      const std::string b = line.substr(comma + 1);
      const double e = std::stod(a, &used);
      if (used != a.size()) throw std::invalid_argument("trailing characters");
      const double p = std::stod(b, &used);
      if (used != b.size()) throw std::invalid_argument("trailing characters");
      levels.push_back({e, p});
    } catch (const std::exception&) {
      throw ConfigError("row " + std::to_string(row) + ": cannot parse '" + line + "'");
    }
  }
  try {
    return from_levels(std::move(levels), options);
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("energy distribution CSV: ") + e.what());
  }
}

}  // namespace lzeros
