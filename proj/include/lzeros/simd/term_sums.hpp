#pragma once

#include <complex>
#include <limits>
#include <span>
#include <string_view>

namespace lzeros::simd {

// Log-domain partial sums of an exponential sum
//
//   L(beta + i t) = sum_j exp(log_w[j] - E[j] beta) exp(-i E[j] t)
//                 = exp(shift) * value
//
// where shift = max_j(log_w[j] - E[j] beta), so every scaled term is <= 1.
// moment carries sum_j E[j] * (scaled term j), giving L'(z) = -exp(shift) * moment.
// magnitude is the sum of the scaled moduli, the natural error scale.
struct TermSums {
  double shift = -std::numeric_limits<double>::infinity();
  std::complex<double> value{0.0, 0.0};
  std::complex<double> moment{0.0, 0.0};
  double magnitude = 0.0;
};

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);

// True when the variant was compiled in and the running CPU supports it.
bool isa_available(Isa isa);

// Best available variant, honoring LZEROS_ISA=scalar|avx2 from the environment.
Isa detected_isa();

Isa active_isa();

// Selects the variant used by term_sums(). Throws InvalidArgument when the
// variant is unavailable.
void set_active_isa(Isa isa);

// Reference implementation; defines the semantics of every other variant.
TermSums term_sums_scalar(std::span<const double> log_w, std::span<const double> energies,
                          double beta, double t);

// Same sums accumulated in long double (64-bit mantissa on x86).
TermSums term_sums_extended(std::span<const double> log_w, std::span<const double> energies,
                            double beta, double t);

// Same sums accumulated in quad precision (long double without libquadmath).
// Used where the double sum cancels down to its rounding level.
TermSums term_sums_precise(std::span<const double> log_w, std::span<const double> energies,
                           double beta, double t);

#if defined(LZEROS_HAVE_AVX2)
TermSums term_sums_avx2(std::span<const double> log_w, std::span<const double> energies,
                        double beta, double t);
#endif

// Runtime-dispatched entry point.
TermSums term_sums(std::span<const double> log_w, std::span<const double> energies,
                   double beta, double t);

}  // namespace lzeros::simd
