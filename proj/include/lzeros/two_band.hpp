#pragma once

#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

#include "lzeros/amplitude.hpp"
#include "lzeros/energy_distribution.hpp"
#include "lzeros/envelope.hpp"
#include "lzeros/zero_set.hpp"

namespace lzeros {

struct Bogoliubov {
  std::complex<double> u;
  std::complex<double> v;
};

// Nearest-neighbour Ising chain, critical at h = 1/4.
double ising_dispersion(double q, double h);
Bogoliubov bogoliubov(double q, double h);
// Z_{-q,q}: pair amplitude of mode q in the initial ground state,
// written in the final quasiparticle basis.
std::complex<double> excitation_amplitude(double q, double h_i, double h_f);

// XY chain: eps = 2 sqrt((h - cos q)^2 + gamma^2 sin^2 q),
// tan(theta) = gamma sin q / (h - cos q), u = cos(theta/2), v = i sin(theta/2).
double xy_dispersion(double q, double gamma, double h);
Bogoliubov xy_bogoliubov(double q, double gamma, double h);
std::complex<double> xy_excitation_amplitude(double q, double gamma_i, double h_i, double gamma_f, double h_f);

// Z from the general formula for given initial and final coefficients at
// +q (the -q coefficients follow from u even, v odd in q).
std::complex<double> excitation_from_coefficients(const Bogoliubov& initial, const Bogoliubov& final_coeffs);

struct ModeData {
  double q = 0.0;
  double eps_i = 0.0;
  double eps_f = 0.0;
  std::complex<double> u_i, v_i, u_f, v_f;
  std::complex<double> Z;
  double W = 0.0;       // ln|Z| / eps_f
  double pair_energy = 0.0;  // energy of one quasiparticle pair at h_f
};

enum class TwoBandModel { ising_nn, xy };

struct TwoBandQuench {
  int N = 0;
  TwoBandModel model = TwoBandModel::ising_nn;
  double h_i = 0.0, h_f = 0.0;
  double gamma_i = 1.0, gamma_f = 1.0;
  // Single-particle energy scale: H = scale * sum_q eps_q (n_q - 1/2) per
  // momentum, so one pair costs 2 * scale * eps_q.
  double energy_scale = 0.125;
  std::vector<ModeData> modes;  // positive allowed momenta, ascending q

  void write_modes_csv(std::ostream& os) const;
};

inline constexpr double kIsingEnergyScale = 0.125;
inline constexpr int kSubsetModeCap = 24;

// Allowed momenta (2m - 1) pi / N, m = 1 .. N/2.
std::vector<double> allowed_momenta(int N);

TwoBandQuench ising_modes(int N, double h_i, double h_f, double energy_scale = kIsingEnergyScale);
TwoBandQuench xy_modes(int N, double gamma_i, double h_i, double gamma_f, double h_f);

// All 2^(N/2) pair configurations; energies relative to the final ground state.
EnergyDistribution bcs_populations(const TwoBandQuench& quench);

// Nested configurations obtained by adding pairs in decreasing W.
Envelope bcs_envelope(const TwoBandQuench& quench);

// Pair order used by bcs_envelope (indices into modes).
std::vector<std::size_t> w_order(const TwoBandQuench& quench);

// z_n(q) = (2 / E_pair) [ln|Z| + i pi (n + 1/2)] for n in [n_min, n_max].
ZeroSet bcs_zeros(const TwoBandQuench& quench, long n_min, long n_max);
// Same zeros restricted to a window.
ZeroSet bcs_zeros(const TwoBandQuench& quench, const SearchWindow& window);

AmplitudeValue factorized_amplitude(const TwoBandQuench& quench, ComplexTime z);
AmplitudeFunction factorized_function(const TwoBandQuench& quench);

// Momenta in (0, pi) where |Z(q)| = 1, located on a fine grid and refined
// by bisection.
std::vector<double> unit_modulus_momenta(double gamma_i, double h_i, double gamma_f, double h_f,
                                         int grid = 20000);

}  // namespace lzeros
