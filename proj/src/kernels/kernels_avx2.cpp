#include "shle/kernels.hpp"

#include "shle/errors.hpp"

#if defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

#include <cstdint>
#include <limits>

namespace shle::kernels {

bool avx2_compiled() { return true; }

namespace avx2 {

void depth_from_disparity(const float* disp, float* depth, std::size_t n,
                          float focal_baseline) {
  const __m256 scale = _mm256_set1_ps(focal_baseline);
  const __m256 zero = _mm256_setzero_ps();
  const __m256 inf = _mm256_set1_ps(std::numeric_limits<float>::infinity());
  const __m256 nan = _mm256_set1_ps(std::numeric_limits<float>::quiet_NaN());

  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 d = _mm256_loadu_ps(disp + i);
    // Ordered compares are false for NaN, so valid = 0 < d < inf.
    const __m256 valid = _mm256_and_ps(_mm256_cmp_ps(d, zero, _CMP_GT_OQ),
                                       _mm256_cmp_ps(d, inf, _CMP_LT_OQ));
    const __m256 z = _mm256_div_ps(scale, d);
    _mm256_storeu_ps(depth + i, _mm256_blendv_ps(nan, z, valid));
  }
  if (i < n) scalar::depth_from_disparity(disp + i, depth + i, n - i,
                                          focal_baseline);
}

namespace {

// exp for 4 doubles, valid for arguments <= 0 (the only case the KDE kernel
// produces). Cody-Waite range reduction plus the Cephes rational polynomial,
// accurate to ~1 ulp on the reduced interval; arguments below -708 flush
// to zero before the scaling step could go subnormal.
inline __m256d exp_nonpositive_pd(__m256d x) {
  const __m256d min_arg = _mm256_set1_pd(-708.0);
  const __m256d underflow = _mm256_cmp_pd(x, min_arg, _CMP_LT_OQ);
  x = _mm256_max_pd(x, min_arg);

  const __m256d log2e = _mm256_set1_pd(1.4426950408889634073599);
  const __m256d ln2_hi = _mm256_set1_pd(6.93145751953125e-1);
  const __m256d ln2_lo = _mm256_set1_pd(1.42860682030941723212e-6);

  const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, log2e),
                                    _MM_FROUND_TO_NEAREST_INT |
                                        _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, ln2_hi, x);
  r = _mm256_fnmadd_pd(n, ln2_lo, r);
  const __m256d z = _mm256_mul_pd(r, r);

  __m256d p = _mm256_set1_pd(1.26177193074810590878e-4);
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(3.02994407707441961300e-2));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(9.99999999999999999910e-1));
  const __m256d rp = _mm256_mul_pd(r, p);

  __m256d q = _mm256_set1_pd(3.00198505138664455042e-6);
  q = _mm256_fmadd_pd(q, z, _mm256_set1_pd(2.52448340349684104192e-3));
  q = _mm256_fmadd_pd(q, z, _mm256_set1_pd(2.27265548208155028766e-1));
  q = _mm256_fmadd_pd(q, z, _mm256_set1_pd(2.00000000000000000005e0));

  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d two = _mm256_set1_pd(2.0);
  __m256d e = _mm256_div_pd(rp, _mm256_sub_pd(q, rp));
  e = _mm256_fmadd_pd(two, e, one);

  // Multiply by 2^n through the exponent field; |n| <= 1021 keeps the
  // result normal.
  const __m128i n32 = _mm256_cvtpd_epi32(n);
  const __m256i n64 = _mm256_cvtepi32_epi64(n32);
  const __m256i bits = _mm256_add_epi64(_mm256_castpd_si256(e),
                                        _mm256_slli_epi64(n64, 52));
  e = _mm256_castsi256_pd(bits);

  return _mm256_andnot_pd(underflow, e);
}

inline double hsum_pd(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

}  // namespace

double gaussian_weight_sum(const double* samples, std::size_t n, double x,
                           double inv_bandwidth) {
  const __m256d xv = _mm256_set1_pd(x);
  const __m256d inv_h = _mm256_set1_pd(inv_bandwidth);
  const __m256d neg_half = _mm256_set1_pd(-0.5);

  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d s = _mm256_loadu_pd(samples + i);
    const __m256d u = _mm256_mul_pd(_mm256_sub_pd(xv, s), inv_h);
    const __m256d arg = _mm256_mul_pd(neg_half, _mm256_mul_pd(u, u));
    acc = _mm256_add_pd(acc, exp_nonpositive_pd(arg));
  }
  double sum = hsum_pd(acc);
  if (i < n) sum += scalar::gaussian_weight_sum(samples + i, n - i, x,
                                                inv_bandwidth);
  return sum;
}

void corr_accumulate(const float* a, const float* b, std::size_t n,
                     CorrStats& acc) {
  __m256d sa = _mm256_setzero_pd();
  __m256d sb = _mm256_setzero_pd();
  __m256d saa = _mm256_setzero_pd();
  __m256d sbb = _mm256_setzero_pd();
  __m256d sab = _mm256_setzero_pd();

  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d av = _mm256_cvtps_pd(_mm_loadu_ps(a + i));
    const __m256d bv = _mm256_cvtps_pd(_mm_loadu_ps(b + i));
    sa = _mm256_add_pd(sa, av);
    sb = _mm256_add_pd(sb, bv);
    saa = _mm256_fmadd_pd(av, av, saa);
    sbb = _mm256_fmadd_pd(bv, bv, sbb);
    sab = _mm256_fmadd_pd(av, bv, sab);
  }

  acc.sum_a += hsum_pd(sa);
  acc.sum_b += hsum_pd(sb);
  acc.sum_aa += hsum_pd(saa);
  acc.sum_bb += hsum_pd(sbb);
  acc.sum_ab += hsum_pd(sab);
  acc.count += i;
  if (i < n) scalar::corr_accumulate(a + i, b + i, n - i, acc);
}

}  // namespace avx2
}  // namespace shle::kernels

#else  // no AVX2 in this build: keep the symbols so dispatch still links.

namespace shle::kernels {

bool avx2_compiled() { return false; }

namespace avx2 {

void depth_from_disparity(const float*, float*, std::size_t, float) {
  throw ConfigurationError("AVX2 kernels not compiled into this binary");
}

double gaussian_weight_sum(const double*, std::size_t, double, double) {
  throw ConfigurationError("AVX2 kernels not compiled into this binary");
}

void corr_accumulate(const float*, const float*, std::size_t, CorrStats&) {
  throw ConfigurationError("AVX2 kernels not compiled into this binary");
}

}  // namespace avx2
}  // namespace shle::kernels

#endif
