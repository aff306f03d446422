// Compiled with -mavx2 -mfma; only reached through the runtime dispatcher
// after the CPU check in dispatch.cpp.
#include <algorithm>
#include <cmath>

#include "lzeros/simd/term_sums.hpp"
#include "vmath_avx2.hpp"

namespace lzeros::simd {

TermSums term_sums_avx2(std::span<const double> log_w, std::span<const double> energies,
                        double beta, double t) {
  TermSums out;
  const std::size_t n = std::min(log_w.size(), energies.size());
  const std::size_t n4 = n - n % 4;
  const double* lw = log_w.data();
  const double* en = energies.data();

  const __m256d vbeta = _mm256_set1_pd(beta);
  __m256d vmax = _mm256_set1_pd(-std::numeric_limits<double>::infinity());
  for (std::size_t j = 0; j < n4; j += 4) {
    const __m256d a = _mm256_fnmadd_pd(_mm256_loadu_pd(en + j), vbeta, _mm256_loadu_pd(lw + j));
    vmax = _mm256_max_pd(vmax, a);
  }
  double shift = avx2::hmax(vmax);
  for (std::size_t j = n4; j < n; ++j) shift = std::max(shift, lw[j] - en[j] * beta);
  out.shift = shift;
  if (!std::isfinite(shift)) return out;

  const __m256d vshift = _mm256_set1_pd(shift);
  const __m256d vt = _mm256_set1_pd(t);
  __m256d re = _mm256_setzero_pd(), im = _mm256_setzero_pd();
  __m256d mre = _mm256_setzero_pd(), mim = _mm256_setzero_pd();
  __m256d mag = _mm256_setzero_pd();
  for (std::size_t j = 0; j < n4; j += 4) {
    const __m256d e = _mm256_loadu_pd(en + j);
    const __m256d a = _mm256_sub_pd(_mm256_fnmadd_pd(e, vbeta, _mm256_loadu_pd(lw + j)), vshift);
    const __m256d w = avx2::exp_pd(a);
    __m256d s, c;
    avx2::sincos_pd(_mm256_mul_pd(e, vt), &s, &c);
    const __m256d wc = _mm256_mul_pd(w, c);
    const __m256d ws = _mm256_mul_pd(w, s);
    re = _mm256_add_pd(re, wc);
    im = _mm256_sub_pd(im, ws);
    mre = _mm256_fmadd_pd(e, wc, mre);
    mim = _mm256_fnmadd_pd(e, ws, mim);
    mag = _mm256_add_pd(mag, w);
  }
  double sre = avx2::hsum(re), sim = avx2::hsum(im);
  double smre = avx2::hsum(mre), smim = avx2::hsum(mim);
  double smag = avx2::hsum(mag);
  for (std::size_t j = n4; j < n; ++j) {
    const double w = std::exp(lw[j] - en[j] * beta - shift);
    const double c = std::cos(en[j] * t);
    const double s = std::sin(en[j] * t);
    sre += w * c;
    sim -= w * s;
    smre += en[j] * w * c;
    smim -= en[j] * w * s;
    smag += w;
  }
  out.value = {sre, sim};
  out.moment = {smre, smim};
  out.magnitude = smag;
  return out;
}

}  // namespace lzeros::simd
