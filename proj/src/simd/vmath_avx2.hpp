#pragma once
// Double-precision exp and sincos on four lanes, AVX2 + FMA.
//
// Polynomials and range-reduction constants follow the Cephes library
// (exp.c, sin.c). Accuracy is within a few ulp of libm over the argument
// ranges the kernels use: exp for x <= 0, sincos for |x| < 1e8.

#include <immintrin.h>

namespace lzeros::simd::avx2 {

inline __m256d exp_pd(__m256d x) {
  const __m256d lo = _mm256_set1_pd(-708.39641853226408);
  const __m256d hi = _mm256_set1_pd(709.78271289338397);
  const __m256d log2e = _mm256_set1_pd(1.4426950408889634073599);
  const __m256d c1 = _mm256_set1_pd(6.93145751953125E-1);
  const __m256d c2 = _mm256_set1_pd(1.42860682030941723212E-6);
  const __m256d p0 = _mm256_set1_pd(1.26177193074810590878E-4);
  const __m256d p1 = _mm256_set1_pd(3.02994407707441961300E-2);
  const __m256d p2 = _mm256_set1_pd(9.99999999999999999910E-1);
  const __m256d q0 = _mm256_set1_pd(3.00198505138664455042E-6);
  const __m256d q1 = _mm256_set1_pd(2.52448340349684104192E-3);
  const __m256d q2 = _mm256_set1_pd(2.27265548208155028766E-1);
  const __m256d q3 = _mm256_set1_pd(2.00000000000000000009E0);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d two = _mm256_set1_pd(2.0);

  const __m256d underflow = _mm256_cmp_pd(x, lo, _CMP_LT_OQ);
  x = _mm256_min_pd(_mm256_max_pd(x, lo), hi);

  const __m256d fx =
      _mm256_round_pd(_mm256_mul_pd(x, log2e), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(fx, c1, x);
  r = _mm256_fnmadd_pd(fx, c2, r);
  const __m256d rr = _mm256_mul_pd(r, r);

  __m256d px = _mm256_fmadd_pd(p0, rr, p1);
  px = _mm256_fmadd_pd(px, rr, p2);
  px = _mm256_mul_pd(px, r);
  __m256d qx = _mm256_fmadd_pd(q0, rr, q1);
  qx = _mm256_fmadd_pd(qx, rr, q2);
  qx = _mm256_fmadd_pd(qx, rr, q3);

  __m256d e = _mm256_div_pd(px, _mm256_sub_pd(qx, px));
  e = _mm256_fmadd_pd(two, e, one);

  // Scale by 2^fx through the exponent field; fx is in [-1022, 1024).
  const __m128i n32 = _mm256_cvtpd_epi32(fx);
  __m256i n64 = _mm256_cvtepi32_epi64(n32);
  n64 = _mm256_add_epi64(n64, _mm256_set1_epi64x(1023));
  n64 = _mm256_slli_epi64(n64, 52);
  e = _mm256_mul_pd(e, _mm256_castsi256_pd(n64));
  return _mm256_andnot_pd(underflow, e);
}

inline void sincos_pd(__m256d x, __m256d* sin_out, __m256d* cos_out) {
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  const __m256d four_over_pi = _mm256_set1_pd(1.27323954473516268615);
  const __m256d dp1 = _mm256_set1_pd(7.85398125648498535156E-1);
  const __m256d dp2 = _mm256_set1_pd(3.77489470793079817668E-8);
  const __m256d dp3 = _mm256_set1_pd(2.69515142907905952645E-15);
  const __m256d s0 = _mm256_set1_pd(1.58962301576546568060E-10);
  const __m256d s1 = _mm256_set1_pd(-2.50507477628578072866E-8);
  const __m256d s2 = _mm256_set1_pd(2.75573136213857245213E-6);
  const __m256d s3 = _mm256_set1_pd(-1.98412698295895385996E-4);
  const __m256d s4 = _mm256_set1_pd(8.33333333332211858878E-3);
  const __m256d s5 = _mm256_set1_pd(-1.66666666666666307295E-1);
  const __m256d k0 = _mm256_set1_pd(-1.13585365213876817300E-11);
  const __m256d k1 = _mm256_set1_pd(2.08757008419747316778E-9);
  const __m256d k2 = _mm256_set1_pd(-2.75573141792967388112E-7);
  const __m256d k3 = _mm256_set1_pd(2.48015872888517045348E-5);
  const __m256d k4 = _mm256_set1_pd(-1.38888888888730564116E-3);
  const __m256d k5 = _mm256_set1_pd(4.16666666666665929218E-2);
  const __m256d half = _mm256_set1_pd(0.5);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d two = _mm256_set1_pd(2.0);
  const __m256d four = _mm256_set1_pd(4.0);
  const __m256d six = _mm256_set1_pd(6.0);
  const __m256d eight = _mm256_set1_pd(8.0);
  const __m256d eighth = _mm256_set1_pd(0.125);

  const __m256d x_sign = _mm256_and_pd(x, sign_mask);
  const __m256d ax = _mm256_andnot_pd(sign_mask, x);

  // Octant index j = floor(|x| 4/pi) mod 8, rounded up to even.
  __m256d y = _mm256_floor_pd(_mm256_mul_pd(ax, four_over_pi));
  __m256d j = _mm256_fnmadd_pd(_mm256_floor_pd(_mm256_mul_pd(y, eighth)), eight, y);
  const __m256d odd = _mm256_fnmadd_pd(_mm256_floor_pd(_mm256_mul_pd(j, half)), two, j);
  y = _mm256_add_pd(y, odd);
  j = _mm256_add_pd(j, odd);
  j = _mm256_sub_pd(j, _mm256_and_pd(_mm256_cmp_pd(j, eight, _CMP_EQ_OQ), eight));

  __m256d z = _mm256_fnmadd_pd(y, dp1, ax);
  z = _mm256_fnmadd_pd(y, dp2, z);
  z = _mm256_fnmadd_pd(y, dp3, z);
  const __m256d zz = _mm256_mul_pd(z, z);

  __m256d ps = _mm256_fmadd_pd(s0, zz, s1);
  ps = _mm256_fmadd_pd(ps, zz, s2);
  ps = _mm256_fmadd_pd(ps, zz, s3);
  ps = _mm256_fmadd_pd(ps, zz, s4);
  ps = _mm256_fmadd_pd(ps, zz, s5);
  ps = _mm256_fmadd_pd(_mm256_mul_pd(z, zz), ps, z);

  __m256d pc = _mm256_fmadd_pd(k0, zz, k1);
  pc = _mm256_fmadd_pd(pc, zz, k2);
  pc = _mm256_fmadd_pd(pc, zz, k3);
  pc = _mm256_fmadd_pd(pc, zz, k4);
  pc = _mm256_fmadd_pd(pc, zz, k5);
  pc = _mm256_fmadd_pd(_mm256_mul_pd(zz, zz), pc, _mm256_fnmadd_pd(half, zz, one));

  const __m256d is2 = _mm256_cmp_pd(j, two, _CMP_EQ_OQ);
  const __m256d is4 = _mm256_cmp_pd(j, four, _CMP_EQ_OQ);
  const __m256d is6 = _mm256_cmp_pd(j, six, _CMP_EQ_OQ);
  const __m256d swap = _mm256_or_pd(is2, is6);

  __m256d s = _mm256_blendv_pd(ps, pc, swap);
  __m256d c = _mm256_blendv_pd(pc, ps, swap);

  const __m256d sin_neg = _mm256_and_pd(_mm256_cmp_pd(j, four, _CMP_GE_OQ), sign_mask);
  s = _mm256_xor_pd(s, _mm256_xor_pd(sin_neg, x_sign));
  const __m256d cos_neg = _mm256_and_pd(_mm256_or_pd(is2, is4), sign_mask);
  c = _mm256_xor_pd(c, cos_neg);

  *sin_out = s;
  *cos_out = c;
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

inline double hmax(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d m = _mm_max_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_max_sd(m, _mm_unpackhi_pd(m, m)));
}

}  // namespace lzeros::simd::avx2
