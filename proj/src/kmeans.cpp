#include <algorithm>
#include <cstdint>
#include <limits>
#include <vector>

#include "lgw/codebook.hpp"
#include "lgw/error.hpp"
#include "lgw/kernels.hpp"
#include "lgw/rng.hpp"

namespace lgw {
namespace {

std::vector<int> assign_points(const std::vector<std::vector<double>>& pts,
                               const std::vector<std::vector<double>>& cents) {
  const kernels::Ops& k = kernels::ops();
  std::vector<int> assign(pts.size(), 0);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    int best_c = 0;
    for (std::size_t c = 0; c < cents.size(); ++c) {
      const double d =
          k.sq_l2(pts[i].data(), cents[c].data(), pts[i].size());
      if (d < best) {
        best = d;
        best_c = static_cast<int>(c);
      }
    }
    assign[i] = best_c;
  }
  return assign;
}

}  // namespace

std::vector<std::vector<double>> kmeans_baseline_dictionary(
    const std::vector<std::vector<double>>& descriptors, int k,
    std::uint64_t rng_seed, int max_iters) {
  const std::size_t n = descriptors.size();
  if (n == 0) {
    fail("k-means requested on an empty descriptor set");
  }
  if (k < 1 || static_cast<std::size_t>(k) > n) {
    fail("k-means with k=", k, " needs 1 <= k <= ", n);
  }
  if (max_iters < 1) {
    fail("k-means max_iters must be positive, got ", max_iters);
  }
  const std::size_t dim = descriptors[0].size();
  for (const auto& d : descriptors) {
    if (d.size() != dim) {
      fail("k-means descriptors have mixed dimensions ", dim, " and ",
           d.size());
    }
  }

  Rng rng(rng_seed);
  std::vector<std::size_t> init = rng.sample_distinct(n, k);
  std::vector<std::vector<double>> centroids;
  centroids.reserve(k);
  for (std::size_t idx : init) {
    centroids.push_back(descriptors[idx]);
  }

  std::vector<int> assign;
  for (int iter = 0; iter < max_iters; ++iter) {
    std::vector<int> next = assign_points(descriptors, centroids);
    if (iter > 0 && next == assign) break;
    assign = std::move(next);

    std::vector<std::vector<double>> sums(
        k, std::vector<double>(dim, 0.0));
    std::vector<int> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      kernels::ops().add_inplace(sums[assign[i]].data(),
                                 descriptors[i].data(), dim);
      ++counts[assign[i]];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;
      centroids[c] = sums[c];
      kernels::ops().scale(centroids[c].data(), dim, 1.0 / counts[c]);
    }

    std::vector<char> reseeded(n, 0);
    for (int c = 0; c < k; ++c) {
      if (counts[c] != 0) continue;
      double far = -1.0;
      std::size_t far_i = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (reseeded[i]) continue;
        const double d = kernels::ops().sq_l2(
            descriptors[i].data(), centroids[assign[i]].data(), dim);
        if (d > far) {
          far = d;
          far_i = i;
        }
      }
      centroids[c] = descriptors[far_i];
      reseeded[far_i] = 1;
    }
  }
  return centroids;
}

}  // namespace lgw
