#include <algorithm>
#include <cmath>

#include "lzeros/simd/term_sums.hpp"

#if defined(LZEROS_HAVE_QUADMATH)
#include <quadmath.h>
#endif

namespace lzeros::simd {

namespace {

long double wide_exp(long double x) { return std::exp(x); }
void wide_sincos(long double x, long double* s, long double* c) {
  *s = std::sin(x);
  *c = std::cos(x);
}

#if defined(LZEROS_HAVE_QUADMATH)
__float128 wide_exp(__float128 x) { return expq(x); }
void wide_sincos(__float128 x, __float128* s, __float128* c) { sincosq(x, s, c); }
using Quad = __float128;
#else
using Quad = long double;
#endif

template <class Wide>
TermSums wide_sums(std::span<const double> log_w, std::span<const double> energies, double beta,
                   double t) {
  TermSums out;
  const std::size_t n = std::min(log_w.size(), energies.size());
  for (std::size_t j = 0; j < n; ++j)
    out.shift = std::max(out.shift, log_w[j] - energies[j] * beta);
  if (!std::isfinite(out.shift)) return out;

  const Wide b = beta, tt = t, shift = out.shift;
  Wide re = 0, im = 0, mre = 0, mim = 0, mag = 0;
  for (std::size_t j = 0; j < n; ++j) {
    if (!std::isfinite(log_w[j])) continue;
    const Wide e = energies[j];
    const Wide w = wide_exp(static_cast<Wide>(log_w[j]) - e * b - shift);
    Wide s, c;
    wide_sincos(e * tt, &s, &c);
    re += w * c;
    im -= w * s;
    mre += e * w * c;
    mim -= e * w * s;
    mag += w;
  }
  out.value = {static_cast<double>(re), static_cast<double>(im)};
  out.moment = {static_cast<double>(mre), static_cast<double>(mim)};
  out.magnitude = static_cast<double>(mag);
  return out;
}

}  // namespace

TermSums term_sums_extended(std::span<const double> log_w, std::span<const double> energies,
                            double beta, double t) {
  return wide_sums<long double>(log_w, energies, beta, t);
}

TermSums term_sums_precise(std::span<const double> log_w, std::span<const double> energies,
                           double beta, double t) {
  return wide_sums<Quad>(log_w, energies, beta, t);
}

}  // namespace lzeros::simd
