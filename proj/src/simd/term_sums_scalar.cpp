#include <algorithm>
#include <cmath>

#include "lzeros/simd/term_sums.hpp"

namespace lzeros::simd {

TermSums term_sums_scalar(std::span<const double> log_w, std::span<const double> energies,
                          double beta, double t) {
  TermSums out;
  const std::size_t n = std::min(log_w.size(), energies.size());
  for (std::size_t j = 0; j < n; ++j)
    out.shift = std::max(out.shift, log_w[j] - energies[j] * beta);
  if (!std::isfinite(out.shift)) return out;

  double re = 0.0, im = 0.0, mre = 0.0, mim = 0.0, mag = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double w = std::exp(log_w[j] - energies[j] * beta - out.shift);
    const double phase = energies[j] * t;
    const double c = std::cos(phase);
    const double s = std::sin(phase);
    re += w * c;
    im -= w * s;
    mre += energies[j] * w * c;
    mim -= energies[j] * w * s;
    mag += w;
  }
  out.value = {re, im};
  out.moment = {mre, mim};
  out.magnitude = mag;
  return out;
}

}  // namespace lzeros::simd
