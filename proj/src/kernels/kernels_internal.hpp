#pragma once

#include "lgw/kernels.hpp"

namespace lgw::kernels::detail {

// Each architecture TU exports its table, or nullptr when the build target
// does not include that architecture at all.
const Ops* scalar_table();
const Ops* avx2_table();
const Ops* neon_table();

// Runtime CPU check for tables the build knows about.
bool avx2_available();
bool neon_available();

/// exp() via Cephes-style Cody-Waite reduction plus a rational polynomial,
/// the same arithmetic the vector backends use lane-wise. Tail elements of
/// vectorized loops go through this so a backend is internally consistent.
inline double cephes_exp(double x) {
  static constexpr double kMaxX = 709.782712893383996843;
  static constexpr double kMinX = -708.396418532264106224;
  static constexpr double kLog2E = 1.4426950408889634073599;
  static constexpr double kC1 = 6.93145751953125e-1;
  static constexpr double kC2 = 1.42860682030941723212e-6;

  if (x != x) return x;
  if (x > kMaxX) return __builtin_huge_val();
  if (x < kMinX) return 0.0;

  double n = __builtin_floor(kLog2E * x + 0.5);
  double r = x - n * kC1;
  r -= n * kC2;
  double rr = r * r;

  double p = 1.26177193074810590878e-4;
  p = p * rr + 3.02994407707441961300e-2;
  p = p * rr + 9.99999999999999999910e-1;
  p *= r;

  double q = 3.00198505138664455042e-6;
  q = q * rr + 2.52448340349684104192e-3;
  q = q * rr + 2.27265548208155028766e-1;
  q = q * rr + 2.0;

  double er = 1.0 + 2.0 * (p / (q - p));

  // 2^n applied as 2^(n-h) * 2^h with h = n/2 (truncated), by direct
  // exponent construction. n lies in [-1022, 1024] after the range clamp;
  // the split keeps each biased exponent inside the normal range even at
  // the n = 1024 endpoint.
  long long ni = static_cast<long long>(n);
  long long h = ni / 2;
  unsigned long long bits_a = static_cast<unsigned long long>(h + 1023) << 52;
  unsigned long long bits_b = static_cast<unsigned long long>(ni - h + 1023)
                              << 52;
  double pa, pb;
  __builtin_memcpy(&pa, &bits_a, sizeof pa);
  __builtin_memcpy(&pb, &bits_b, sizeof pb);
  return er * pa * pb;
}

}  // namespace lgw::kernels::detail
