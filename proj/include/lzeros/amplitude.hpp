#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "lzeros/energy_distribution.hpp"

namespace lzeros {

// L(z) = sum_j k_j exp(-E_j z), evaluated with the largest exponent factored out.
AmplitudeValue evaluate(const EnergyDistribution& dist, ComplexTime z);

// L(z) / L(beta). The divisor is real and positive.
AmplitudeValue evaluate_normalized(const EnergyDistribution& dist, ComplexTime z);

// -log|L(it)/L(0)|, divided by `sites` when given. +inf at a real-time zero.
double rate_function(const EnergyDistribution& dist, double t,
                     std::optional<int> sites = std::nullopt);

// Inverse participation ratio sqrt(sum_j k_j^2).
double ipr(const EnergyDistribution& dist);

struct PerturbationScale {
  double s_ab = 0.0;           // sum of k_j^2 over j != a, b
  double rayleigh_mode = 0.0;  // sqrt(s_ab) / 2
};

PerturbationScale perturbation_scale(const EnergyDistribution& dist, std::size_t a,
                                     std::size_t b);

// Log-amplitude sample used by the zero finder. dlog is L'(z)/L(z) and may
// be NaN when the source cannot provide it.
struct LogSample {
  double log_modulus = 0.0;
  double phase = 0.0;
  std::complex<double> dlog{0.0, 0.0};
};

// Any entire function presented through its logarithm. The winding number
// of the function around a contour equals the number of enclosed zeros.
using AmplitudeFunction = std::function<LogSample(std::complex<double>)>;

// Sampler for a distribution. Energies are shifted to the middle of the
// spectrum first; that multiplies L by a zero-free exponential, which keeps
// every winding number unchanged and slows down the phase rotation.
AmplitudeFunction amplitude_function(const EnergyDistribution& dist);

// Same sampler for raw log weights and energies (no normalization, no floor).
AmplitudeFunction sum_function(std::vector<double> log_weights, std::vector<double> energies);

}  // namespace lzeros
