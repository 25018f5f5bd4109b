#include "kernels_internal.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

#include <cmath>
#include <cstddef>

// NEON (AArch64) backend: two-lane double vectors. Mirrors the AVX2 backend
// structure, including the shared Cephes exp arithmetic.

namespace lgw::kernels::detail {
namespace {

inline float64x2_t exp_f64(float64x2_t x) {
  const float64x2_t max_x = vdupq_n_f64(709.782712893383996843);
  const float64x2_t min_x = vdupq_n_f64(-708.396418532264106224);
  const float64x2_t log2e = vdupq_n_f64(1.4426950408889634073599);
  const float64x2_t c1 = vdupq_n_f64(6.93145751953125e-1);
  const float64x2_t c2 = vdupq_n_f64(1.42860682030941723212e-6);

  uint64x2_t over = vcgtq_f64(x, max_x);
  uint64x2_t under = vcltq_f64(x, min_x);
  uint64x2_t ordered = vceqq_f64(x, x);
  float64x2_t xc = vminq_f64(vmaxq_f64(x, min_x), max_x);

  float64x2_t n =
      vrndmq_f64(vfmaq_f64(vdupq_n_f64(0.5), log2e, xc));
  float64x2_t r = vfmsq_f64(xc, n, c1);
  r = vfmsq_f64(r, n, c2);
  float64x2_t rr = vmulq_f64(r, r);

  float64x2_t p = vdupq_n_f64(1.26177193074810590878e-4);
  p = vfmaq_f64(vdupq_n_f64(3.02994407707441961300e-2), p, rr);
  p = vfmaq_f64(vdupq_n_f64(9.99999999999999999910e-1), p, rr);
  p = vmulq_f64(p, r);

  float64x2_t q = vdupq_n_f64(3.00198505138664455042e-6);
  q = vfmaq_f64(vdupq_n_f64(2.52448340349684104192e-3), q, rr);
  q = vfmaq_f64(vdupq_n_f64(2.27265548208155028766e-1), q, rr);
  q = vfmaq_f64(vdupq_n_f64(2.0), q, rr);

  float64x2_t er = vfmaq_f64(vdupq_n_f64(1.0), vdupq_n_f64(2.0),
                             vdivq_f64(p, vsubq_f64(q, p)));

  // 2^n split as 2^(n>>1) * 2^(n - (n>>1)); n is integral in [-1022, 1024].
  int64x2_t ni = vcvtq_s64_f64(n);
  int64x2_t h = vshrq_n_s64(ni, 1);
  int64x2_t rem = vsubq_s64(ni, h);
  const int64x2_t bias = vdupq_n_s64(1023);
  float64x2_t pa =
      vreinterpretq_f64_s64(vshlq_n_s64(vaddq_s64(h, bias), 52));
  float64x2_t pb =
      vreinterpretq_f64_s64(vshlq_n_s64(vaddq_s64(rem, bias), 52));

  float64x2_t res = vmulq_f64(vmulq_f64(er, pa), pb);
  res = vbslq_f64(under, vdupq_n_f64(0.0), res);
  res = vbslq_f64(over, vdupq_n_f64(__builtin_huge_val()), res);
  res = vbslq_f64(ordered, res, x);
  return res;
}

double sq_l2(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    float64x2_t d0 = vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i));
    float64x2_t d1 = vsubq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
    acc0 = vfmaq_f64(acc0, d0, d0);
    acc1 = vfmaq_f64(acc1, d1, d1);
  }
  if (i + 2 <= n) {
    float64x2_t d = vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i));
    acc0 = vfmaq_f64(acc0, d, d);
    i += 2;
  }
  double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) {
    double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

double l1_dist(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vaddq_f64(acc0,
                     vabdq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    acc1 = vaddq_f64(acc1,
                     vabdq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2)));
  }
  if (i + 2 <= n) {
    acc0 = vaddq_f64(acc0, vabdq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    i += 2;
  }
  double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) acc += std::fabs(a[i] - b[i]);
  return acc;
}

double sum_abs(const double* a, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vaddq_f64(acc0, vabsq_f64(vld1q_f64(a + i)));
    acc1 = vaddq_f64(acc1, vabsq_f64(vld1q_f64(a + i + 2)));
  }
  if (i + 2 <= n) {
    acc0 = vaddq_f64(acc0, vabsq_f64(vld1q_f64(a + i)));
    i += 2;
  }
  double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) acc += std::fabs(a[i]);
  return acc;
}

void scale(double* a, std::size_t n, double s) {
  const float64x2_t sv = vdupq_n_f64(s);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    vst1q_f64(a + i, vmulq_f64(vld1q_f64(a + i), sv));
  for (; i < n; ++i) a[i] *= s;
}

void add_inplace(double* dst, const double* src, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    vst1q_f64(dst + i, vaddq_f64(vld1q_f64(dst + i), vld1q_f64(src + i)));
  for (; i < n; ++i) dst[i] += src[i];
}

void exp_affine(double* dst, const double* a, const double* b, std::size_t n,
                double c0, double c1) {
  const float64x2_t c0v = vdupq_n_f64(c0);
  std::size_t i = 0;
  if (b == nullptr) {
    for (; i + 2 <= n; i += 2)
      vst1q_f64(dst + i, exp_f64(vmulq_f64(c0v, vld1q_f64(a + i))));
    for (; i < n; ++i) dst[i] = cephes_exp(c0 * a[i]);
  } else {
    const float64x2_t c1v = vdupq_n_f64(c1);
    for (; i + 2 <= n; i += 2) {
      float64x2_t t = vfmaq_f64(vmulq_f64(c0v, vld1q_f64(a + i)), c1v,
                                vld1q_f64(b + i));
      vst1q_f64(dst + i, exp_f64(t));
    }
    for (; i < n; ++i) dst[i] = cephes_exp(c0 * a[i] + c1 * b[i]);
  }
}

const Ops kTable = {sq_l2, l1_dist, sum_abs, scale, add_inplace, exp_affine};

}  // namespace

const Ops* neon_table() { return &kTable; }
bool neon_available() { return true; }

}  // namespace lgw::kernels::detail

#else

namespace lgw::kernels::detail {

const Ops* neon_table() { return nullptr; }
bool neon_available() { return false; }

}  // namespace lgw::kernels::detail

#endif
