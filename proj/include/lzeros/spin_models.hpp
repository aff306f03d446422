#pragma once

#include <Eigen/Dense>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "lzeros/energy_distribution.hpp"

namespace lzeros {

enum class Sector { even_parity, odd_parity, full };
enum class Units { extensive, per_site };

std::string sector_name(Sector s);
std::string units_name(Units u);

// Transverse-field Ising chain with Kac-normalized couplings 1/r^alpha.
// alpha = 0 is the fully connected (Lipkin) model, alpha = inf nearest neighbour.
struct IsingSpec {
  int N = 2;
  double h = 0.0;
  double alpha = 0.0;
  Sector sector = Sector::even_parity;
  Units units = Units::per_site;

  // per_site for alpha = 0, extensive otherwise.
  static Units default_units(double alpha) { return alpha == 0.0 ? Units::per_site : Units::extensive; }
  double unit_factor() const { return units == Units::per_site ? 1.0 / N : 1.0; }
  bool collective() const { return alpha == 0.0; }
};

inline constexpr double kInfiniteRange = std::numeric_limits<double>::infinity();
inline constexpr int kLongRangeSizeCap = 14;

double kac_norm(int N, double alpha);

// (N+1) x (N+1) Hamiltonian in the Dicke basis |S = N/2, M>, M = -S..S.
Eigen::MatrixXd build_fully_connected(const IsingSpec& spec);

// Hamiltonian restricted to spec.sector (full 2^N matrix for Sector::full).
// Sector bases use representatives whose highest bit is zero.
Eigen::MatrixXd build_long_range(const IsingSpec& spec);

// Hamiltonian of the requested model and sector, in that sector's basis.
Eigen::MatrixXd sector_hamiltonian(const IsingSpec& spec);

// Sum_i S^x_i (times the unit factor) in the same basis as sector_hamiltonian.
Eigen::MatrixXd sector_transverse(const IsingSpec& spec);

struct QuenchResult {
  // Of H(h_f) in the sector, ascending. For the long-range even sector only
  // the zero-momentum states appear: the others carry no population.
  std::vector<double> eigenvalues;
  std::vector<double> populations;  // |<psi|E_j>|^2
  IsingSpec spec_initial;
  IsingSpec spec_final;
  double initial_energy = 0.0;       // <psi|H(h_i)|psi>
  double transverse_expectation = 0.0;  // <psi|V|psi>
  double mean_energy = 0.0;          // sum_j k_j E_j
  std::optional<double> esqpt_energy;

  EnergyDistribution distribution(const DistributionOptions& options = {}) const;
  std::string to_json(int indent = 2) const;
};

QuenchResult quench(const IsingSpec& initial, const IsingSpec& final_spec);

struct MeanEnergyShift {
  double predicted = 0.0;
  double actual = 0.0;
};

MeanEnergyShift mean_energy_shift(const QuenchResult& q);

// Saddle-point energy of the classical fully connected model, per site.
double esqpt_energy(const IsingSpec& spec);

struct RRatioEntry {
  int N = 0;
  double delta_h = 0.0;
  double ratio_R = 0.0;
};

std::vector<RRatioEntry> r_ratio_scan(double h_i, const std::vector<double>& delta_h_grid,
                                      const std::vector<int>& N_grid);

// First delta_h in (lo, hi] where the largest envelope population changes
// hands (R reaches one), refined by bisection. nullopt when none.
std::optional<double> first_r_crossing(int N, double h_i, double lo, double hi, double step,
                                       double tol = 1e-6);

// Eigen-decomposition helpers.
struct SpectralPopulations {
  std::vector<double> eigenvalues;
  std::vector<double> weights;  // (v_j . psi)^2
};

// Eigenvalues of H and squared overlaps of psi with the eigenvectors,
// without forming the eigenvectors when H is large.
SpectralPopulations spectral_populations(const Eigen::MatrixXd& H, const Eigen::VectorXd& psi);

struct GroundState {
  double energy = 0.0;
  double gap = 0.0;  // to the next eigenvalue (inf for dimension 1)
  Eigen::VectorXd vector;
};

GroundState ground_state(const Eigen::MatrixXd& H);

}  // namespace lzeros
