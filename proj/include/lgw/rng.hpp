#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "lgw/error.hpp"

namespace lgw {

/// Deterministic random source. The raw stream comes from std::mt19937_64
/// (bit-exact across platforms by the standard); the value mappers below are
/// spelled out by hand because the std::*_distribution adapters are
/// implementation-defined and would break cross-toolchain reproducibility.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Unbiased integer in [0, n) via Lemire rejection.
  std::size_t uniform_index(std::size_t n) {
    if (n == 0) fail("uniform_index: empty range");
    std::uint64_t range = n;
    std::uint64_t x = gen_();
    __uint128_t m = static_cast<__uint128_t>(x) * range;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < range) {
      std::uint64_t threshold = (0 - range) % range;
      while (lo < threshold) {
        x = gen_();
        m = static_cast<__uint128_t>(x) * range;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::size_t>(m >> 64);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Standard normal via Box-Muller; caches the second variate.
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    double u2 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  double gaussian(double mean, double stddev) {
    return mean + stddev * gaussian();
  }

  /// k distinct indices from [0, n), in selection order (partial
  /// Fisher-Yates over an index table).
  std::vector<std::size_t> sample_distinct(std::size_t n, std::size_t k) {
    if (k > n) fail("sample_distinct: k=", k, " exceeds n=", n);
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    std::vector<std::size_t> out(k);
    for (std::size_t i = 0; i < k; ++i) {
      std::size_t j = i + uniform_index(n - i);
      std::swap(idx[i], idx[j]);
      out[i] = idx[i];
    }
    return out;
  }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace lgw
