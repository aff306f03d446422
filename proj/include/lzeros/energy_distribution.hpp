#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace lzeros {

// Point z = beta + i t of the complex-time plane.
struct ComplexTime {
  double beta = 0.0;
  double t = 0.0;

  constexpr ComplexTime() = default;
  constexpr ComplexTime(double b, double time) : beta(b), t(time) {}
  explicit ComplexTime(std::complex<double> z) : beta(z.real()), t(z.imag()) {}

  std::complex<double> as_complex() const { return {beta, t}; }
  ComplexTime conj() const { return {beta, -t}; }
  friend bool operator==(const ComplexTime&, const ComplexTime&) = default;
};

// Survival amplitude in polar log form: L = exp(log_modulus + i phase).
struct AmplitudeValue {
  double log_modulus = 0.0;
  double phase = 0.0;  // (-pi, pi]

  double modulus() const;
  std::complex<double> as_complex() const;
  bool is_zero() const {
    return log_modulus == -std::numeric_limits<double>::infinity();
  }
};

struct Level {
  double energy = 0.0;
  double population = 0.0;
};

struct DistributionOptions {
  // Levels closer than merge_tolerance * (E_max - E_min) are merged.
  double merge_tolerance = 1e-10;
  // Normalized populations below this are dropped.
  double population_floor = 1e-14;
};

// Record of what normalization did to the raw input.
struct DistributionMetadata {
  std::size_t input_levels = 0;
  std::size_t merged_levels = 0;
  std::size_t dropped_levels = 0;
  double dropped_mass = 0.0;
};

// Discrete energy distribution k(E) = sum_j k_j delta(E - E_j).
//
// Energies are strictly increasing, populations are positive and sum to one.
// Always built through from_levels(), which sorts, merges degenerate levels,
// normalizes and drops negligible populations.
class EnergyDistribution {
 public:
  static EnergyDistribution from_levels(std::vector<Level> levels,
                                        const DistributionOptions& options = {},
                                        std::string label = {});
  static EnergyDistribution from_arrays(std::span<const double> energies,
                                        std::span<const double> populations,
                                        const DistributionOptions& options = {},
                                        std::string label = {});

  std::size_t size() const { return energies_.size(); }
  std::span<const double> energies() const { return energies_; }
  std::span<const double> populations() const { return populations_; }
  // Natural log of each population, used by the log-domain kernels.
  std::span<const double> log_populations() const { return log_populations_; }
  double energy(std::size_t j) const { return energies_[j]; }
  double population(std::size_t j) const { return populations_[j]; }
  double energy_span() const { return energies_.back() - energies_.front(); }
  double mean_energy() const;
  const std::string& label() const { return label_; }
  const DistributionMetadata& metadata() const { return metadata_; }

  // Index of the level whose energy is within tol of e, or size() if none.
  std::size_t find_energy(double e, double tol) const;

  void write_csv(std::ostream& os) const;
  static EnergyDistribution read_csv(std::istream& is,
                                     const DistributionOptions& options = {});

 private:
  EnergyDistribution() = default;

  std::vector<double> energies_;
  std::vector<double> populations_;
  std::vector<double> log_populations_;
  std::string label_;
  DistributionMetadata metadata_;
};

}  // namespace lzeros
