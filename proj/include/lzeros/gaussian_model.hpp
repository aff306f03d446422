#pragma once

#include <complex>
#include <vector>

#include "lzeros/amplitude.hpp"
#include "lzeros/energy_distribution.hpp"
#include "lzeros/zero_set.hpp"

namespace lzeros {

// Levels E_j = E_GS + j delta + j^2 epsilon / 2 for j_min <= j <= j_max,
// populated with k_j ~ exp(-(j - mu)^2 / (2 sigma^2)).
struct GaussianSpec {
  double delta = 1.0;
  double epsilon = 0.0;
  double sigma = 1.0;
  double mu = 0.0;
  int j_min = -10;
  int j_max = 10;
  double E_GS = 0.0;

  double energy(double j) const { return E_GS + j * delta + 0.5 * j * j * epsilon; }
  // E_{j+1} - E_j = delta + epsilon (j + 1/2)
  double spacing(double j) const { return delta + epsilon * (j + 0.5); }
  double log_weight(double j) const { return -(j - mu) * (j - mu) / (2.0 * sigma * sigma); }
  void validate() const;
};

EnergyDistribution build_distribution(const GaussianSpec& spec,
                                      const DistributionOptions& options = {});

// Amplitude of the bounded model summed directly from log weights, so far
// tails never underflow. Suitable for the zero finder.
AmplitudeFunction bounded_function(const GaussianSpec& spec);

struct ThetaArgs {
  std::complex<double> u;
  std::complex<double> tau;
};

// theta_3(u, tau) = sum_j exp(2 i j u + i pi tau j^2).
std::complex<double> theta3(const ThetaArgs& args);
// log theta_3, safe when the value itself would overflow. Real part is
// log|theta_3|; the imaginary part is its phase.
std::complex<double> log_theta3(const ThetaArgs& args);

// Spec with mu moved to zero by re-indexing j -> j - round(mu). The
// remaining fractional offset is returned in `residual`.
struct CenteredSpec {
  GaussianSpec spec;
  int shift = 0;
  double residual = 0.0;
};
CenteredSpec center_spec(const GaussianSpec& spec);

std::complex<double> theta_u(const GaussianSpec& spec, std::complex<double> z);
std::complex<double> theta_tau(const GaussianSpec& spec, std::complex<double> z);

// Unbounded (j over all integers) amplitude normalized by its value at beta.
AmplitudeValue unbounded_amplitude(const GaussianSpec& spec, ComplexTime z);

// Exact zeros of the unbounded model. The pair (j - 1, j) gives
// z = [-(2j - 1) / (2 sigma^2) + 2 pi i (n + 1/2)] / (delta + epsilon (j - 1/2)).
ComplexTime unbounded_zero(const GaussianSpec& spec, int j, long n);
ZeroSet unbounded_zeros(const GaussianSpec& spec, const SearchWindow& window);

struct Polyline {
  long id = 0;
  std::vector<ComplexTime> points;
};

// Continuous curves through the unbounded zeros, parametrized by x:
// beta(x) = -(2x - 1) / (2 sigma^2 D(x)), t_n(x) = 2 pi (n + 1/2) / D(x),
// D(x) = delta + epsilon (x - 1/2).
std::vector<Polyline> zero_lines(const GaussianSpec& spec, long n_min, long n_max, double x_min,
                                 double x_max, int samples = 200);

// |theta_3(pi/2 delta/delta_center, tau(z))| / theta_3(0, tau(beta)).
double theta_decay(const GaussianSpec& spec, ComplexTime z);
double delta_center(const GaussianSpec& spec, double beta);

struct BoundedDecomposition {
  AmplitudeValue L_G;  // sum over j_min..j_max
  AmplitudeValue L_U;  // sum over all j
  AmplitudeValue C;    // sum over j outside the range
  double residual = 0.0;  // |L_G - (L_U - C)| / max(|L_U|, |C|)
};

BoundedDecomposition bounded_decomposition(const GaussianSpec& spec, ComplexTime z);

// Single unbounded term l_j(z) = exp(log_weight(j) - z E_j).
AmplitudeValue gaussian_term(const GaussianSpec& spec, int j, ComplexTime z);

// K(z) = sum k_j j^2 e^{-z j delta} / sum k_j j e^{-z j delta}.
std::complex<double> k_ratio(const GaussianSpec& spec, std::complex<double> z);

// First-order zero positions z0(n) (1 - epsilon K(z0) / (2 delta)) with
// z0(n) = z0 + 2 pi i n / delta, one polyline per seed.
std::vector<Polyline> zero_trajectories(const GaussianSpec& spec,
                                        const std::vector<ComplexTime>& seeds, long n_min,
                                        long n_max);

struct GaussianFit {
  GaussianSpec spec;
  double population_rms = 0.0;
  double energy_rms = 0.0;
};

// Least-squares fit of a Gaussian in the level index j to the populations
// and of a parabola in j to the energies.
GaussianFit fit_gaussian(const EnergyDistribution& dist);

}  // namespace lzeros
