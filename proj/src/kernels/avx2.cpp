#include "kernels_internal.hpp"

#if defined(__x86_64__) || defined(__i386__)

#include <immintrin.h>

#include <cmath>
#include <cstddef>

// AVX2+FMA backend. Built unconditionally on x86 via per-function target
// attributes; dispatch.cpp only hands the table out after the CPUID check.

#define LGW_AVX2 __attribute__((target("avx2,fma")))

namespace lgw::kernels::detail {
namespace {

LGW_AVX2 inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

LGW_AVX2 inline __m256d abs_pd(__m256d v) {
  return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v);
}

// Vector exp, same Cephes reduction and polynomial as cephes_exp() so the
// scalar tail of a vectorized loop matches the lanes bit for bit apart from
// contraction differences.
LGW_AVX2 inline __m256d exp_pd(__m256d x) {
  const __m256d max_x = _mm256_set1_pd(709.782712893383996843);
  const __m256d min_x = _mm256_set1_pd(-708.396418532264106224);
  const __m256d log2e = _mm256_set1_pd(1.4426950408889634073599);
  const __m256d c1 = _mm256_set1_pd(6.93145751953125e-1);
  const __m256d c2 = _mm256_set1_pd(1.42860682030941723212e-6);

  __m256d over = _mm256_cmp_pd(x, max_x, _CMP_GT_OQ);
  __m256d under = _mm256_cmp_pd(x, min_x, _CMP_LT_OQ);
  __m256d self = _mm256_cmp_pd(x, x, _CMP_UNORD_Q);
  __m256d xc = _mm256_min_pd(_mm256_max_pd(x, min_x), max_x);

  __m256d n = _mm256_floor_pd(_mm256_fmadd_pd(log2e, xc, _mm256_set1_pd(0.5)));
  __m256d r = _mm256_fnmadd_pd(n, c1, xc);
  r = _mm256_fnmadd_pd(n, c2, r);
  __m256d rr = _mm256_mul_pd(r, r);

  __m256d p = _mm256_set1_pd(1.26177193074810590878e-4);
  p = _mm256_fmadd_pd(p, rr, _mm256_set1_pd(3.02994407707441961300e-2));
  p = _mm256_fmadd_pd(p, rr, _mm256_set1_pd(9.99999999999999999910e-1));
  p = _mm256_mul_pd(p, r);

  __m256d q = _mm256_set1_pd(3.00198505138664455042e-6);
  q = _mm256_fmadd_pd(q, rr, _mm256_set1_pd(2.52448340349684104192e-3));
  q = _mm256_fmadd_pd(q, rr, _mm256_set1_pd(2.27265548208155028766e-1));
  q = _mm256_fmadd_pd(q, rr, _mm256_set1_pd(2.0));

  __m256d er = _mm256_fmadd_pd(
      _mm256_set1_pd(2.0), _mm256_div_pd(p, _mm256_sub_pd(q, p)),
      _mm256_set1_pd(1.0));

  // 2^n split as 2^(n>>1) * 2^(n - (n>>1)); n is integral in [-1022, 1024].
  __m128i ni = _mm256_cvtpd_epi32(n);
  __m128i h = _mm_srai_epi32(ni, 1);
  __m128i rem = _mm_sub_epi32(ni, h);
  const __m256i bias = _mm256_set1_epi64x(1023);
  __m256d pa = _mm256_castsi256_pd(_mm256_slli_epi64(
      _mm256_add_epi64(_mm256_cvtepi32_epi64(h), bias), 52));
  __m256d pb = _mm256_castsi256_pd(_mm256_slli_epi64(
      _mm256_add_epi64(_mm256_cvtepi32_epi64(rem), bias), 52));

  __m256d res = _mm256_mul_pd(_mm256_mul_pd(er, pa), pb);
  res = _mm256_blendv_pd(res, _mm256_setzero_pd(), under);
  res = _mm256_blendv_pd(res, _mm256_set1_pd(__builtin_huge_val()), over);
  res = _mm256_blendv_pd(res, x, self);
  return res;
}

LGW_AVX2 double sq_l2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(a + i + 4),
                               _mm256_loadu_pd(b + i + 4));
    acc0 = _mm256_fmadd_pd(d0, d0, acc0);
    acc1 = _mm256_fmadd_pd(d1, d1, acc1);
  }
  if (i + 4 <= n) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc0 = _mm256_fmadd_pd(d, d, acc0);
    i += 4;
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) {
    double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

LGW_AVX2 double l1_dist(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(a + i + 4),
                               _mm256_loadu_pd(b + i + 4));
    acc0 = _mm256_add_pd(acc0, abs_pd(d0));
    acc1 = _mm256_add_pd(acc1, abs_pd(d1));
  }
  if (i + 4 <= n) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc0 = _mm256_add_pd(acc0, abs_pd(d));
    i += 4;
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += std::fabs(a[i] - b[i]);
  return acc;
}

LGW_AVX2 double sum_abs(const double* a, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, abs_pd(_mm256_loadu_pd(a + i)));
    acc1 = _mm256_add_pd(acc1, abs_pd(_mm256_loadu_pd(a + i + 4)));
  }
  if (i + 4 <= n) {
    acc0 = _mm256_add_pd(acc0, abs_pd(_mm256_loadu_pd(a + i)));
    i += 4;
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += std::fabs(a[i]);
  return acc;
}

LGW_AVX2 void scale(double* a, std::size_t n, double s) {
  const __m256d sv = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(a + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), sv));
  for (; i < n; ++i) a[i] *= s;
}

LGW_AVX2 void add_inplace(double* dst, const double* src, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(
        dst + i, _mm256_add_pd(_mm256_loadu_pd(dst + i),
                               _mm256_loadu_pd(src + i)));
  for (; i < n; ++i) dst[i] += src[i];
}

LGW_AVX2 void exp_affine(double* dst, const double* a, const double* b,
                         std::size_t n, double c0, double c1) {
  const __m256d c0v = _mm256_set1_pd(c0);
  std::size_t i = 0;
  if (b == nullptr) {
    for (; i + 4 <= n; i += 4) {
      __m256d t = _mm256_mul_pd(c0v, _mm256_loadu_pd(a + i));
      _mm256_storeu_pd(dst + i, exp_pd(t));
    }
    for (; i < n; ++i) dst[i] = cephes_exp(c0 * a[i]);
  } else {
    const __m256d c1v = _mm256_set1_pd(c1);
    for (; i + 4 <= n; i += 4) {
      __m256d t = _mm256_fmadd_pd(c1v, _mm256_loadu_pd(b + i),
                                  _mm256_mul_pd(c0v, _mm256_loadu_pd(a + i)));
      _mm256_storeu_pd(dst + i, exp_pd(t));
    }
    for (; i < n; ++i) dst[i] = cephes_exp(c0 * a[i] + c1 * b[i]);
  }
}

const Ops kTable = {sq_l2, l1_dist, sum_abs, scale, add_inplace, exp_affine};

}  // namespace

const Ops* avx2_table() { return &kTable; }

bool avx2_available() {
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

}  // namespace lgw::kernels::detail

#else

namespace lgw::kernels::detail {

const Ops* avx2_table() { return nullptr; }
bool avx2_available() { return false; }

}  // namespace lgw::kernels::detail

#endif
