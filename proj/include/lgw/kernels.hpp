#pragma once

#include <cstddef>
#include <string_view>

namespace lgw::kernels {

enum class Backend { scalar, avx2, neon };

/// Flat-array numeric primitives used by the hot paths (descriptor
/// distances, CDK matrix updates, signature comparison). Each backend fills
/// one table; all entries are pure functions over their arguments.
///
/// Contracts:
///   sq_l2(a, b, n)        -> sum_i (a[i]-b[i])^2
///   l1_dist(a, b, n)      -> sum_i |a[i]-b[i]|
///   sum_abs(a, n)         -> sum_i |a[i]|
///   scale(a, n, s)        :  a[i] *= s
///   add_inplace(d, s, n)  :  d[i] += s[i]   (elementwise, no reduction)
///   exp_affine(dst, a, b, n, c0, c1) : dst[i] = exp(c0*a[i] + c1*b[i]);
///                           b may be null, meaning dst[i] = exp(c0*a[i])
///
/// Reductions accumulate in a backend-specific but fixed order, so results
/// are deterministic per backend and agree across backends to floating-point
/// tolerance (covered by the equivalence test suite).
struct Ops {
  double (*sq_l2)(const double* a, const double* b, std::size_t n);
  double (*l1_dist)(const double* a, const double* b, std::size_t n);
  double (*sum_abs)(const double* a, std::size_t n);
  void (*scale)(double* a, std::size_t n, double s);
  void (*add_inplace)(double* dst, const double* src, std::size_t n);
  void (*exp_affine)(double* dst, const double* a, const double* b,
                     std::size_t n, double c0, double c1);
};

/// Active table. Resolution order on first use: set_backend() override if
/// one was made, else the LGW_KERNEL_BACKEND environment variable, else CPU
/// detection (widest supported vector backend, scalar as the floor).
const Ops& ops();

/// Table for a specific backend; throws lgw::Error if unsupported here.
const Ops& table(Backend b);

bool supported(Backend b);
Backend active_backend();
void set_backend(Backend b);

/// Parses "scalar" | "avx2" | "neon" | "auto"; "auto" resolves by detection.
Backend parse_backend(std::string_view name);
const char* backend_name(Backend b);

}  // namespace lgw::kernels
