#include <cmath>
#include <cstddef>

#include "kernels_internal.hpp"

// Reference backend: straight sequential loops, std::exp, no reassociation.
// Every other backend is equivalence-tested against this one.

namespace lgw::kernels::detail {
namespace {

double sq_l2(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

double l1_dist(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += std::fabs(a[i] - b[i]);
  return acc;
}

double sum_abs(const double* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += std::fabs(a[i]);
  return acc;
}

void scale(double* a, std::size_t n, double s) {
  for (std::size_t i = 0; i < n; ++i) a[i] *= s;
}

void add_inplace(double* dst, const double* src, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] += src[i];
}

void exp_affine(double* dst, const double* a, const double* b, std::size_t n,
                double c0, double c1) {
  if (b == nullptr) {
    for (std::size_t i = 0; i < n; ++i) dst[i] = std::exp(c0 * a[i]);
  } else {
    for (std::size_t i = 0; i < n; ++i)
      dst[i] = std::exp(c0 * a[i] + c1 * b[i]);
  }
}

const Ops kTable = {sq_l2, l1_dist, sum_abs, scale, add_inplace, exp_affine};

}  // namespace

const Ops* scalar_table() { return &kTable; }

}  // namespace lgw::kernels::detail
