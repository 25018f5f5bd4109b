#include "lgw/codebook.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "lgw/error.hpp"
#include "lgw/parallel.hpp"

namespace lgw {
namespace {

/// Row of the p-th unordered pair when rows i hold pairs (i, i+1..n-1).
int pair_row(std::size_t p, int n, const std::vector<std::size_t>& row_start) {
  int lo = 0;
  int hi = n - 1;
  while (lo < hi) {
    int mid = lo + (hi - lo + 1) / 2;
    if (row_start[mid] <= p) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  return lo;
}

}  // namespace

DissimilarityMatrix compute_dissimilarity_matrix(
    const std::vector<GraphFeature>& items, const CdkParams& params,
    std::size_t threads, std::size_t max_items) {
  if (items.empty()) {
    fail("dissimilarity matrix requested for an empty item set");
  }
  if (items.size() > max_items) {
    fail("dissimilarity matrix over ", items.size(),
         " items exceeds the limit of ", max_items,
         "; subsample the pool before clustering");
  }
  const int n = static_cast<int>(items.size());
  for (int i = 1; i < n; ++i) {
    if (items[i].layer != items[0].layer) {
      fail("dissimilarity matrix items mix layers ", items[0].layer, " and ",
           items[i].layer);
    }
  }

  DissimilarityMatrix dm;
  dm.n = n;
  dm.values.assign(static_cast<std::size_t>(n) * n, 0.0f);

  std::vector<std::size_t> row_start(n, 0);
  std::size_t acc = 0;
  for (int i = 0; i < n; ++i) {
    row_start[i] = acc;
    acc += static_cast<std::size_t>(n - 1 - i);
  }
  const std::size_t n_pairs = acc;

  parallel_for(n_pairs, threads, [&](std::size_t p) {
    const int i = pair_row(p, n, row_start);
    const int j = i + 1 + static_cast<int>(p - row_start[i]);
    const float rho =
        static_cast<float>(graph_dissimilarity(items[i], items[j], params));
    dm.values[static_cast<std::size_t>(i) * n + j] = rho;
    dm.values[static_cast<std::size_t>(j) * n + i] = rho;
  });
  return dm;
}

namespace {

struct PairKey {
  double linkage;
  int lo;
  int hi;

  bool operator<(const PairKey& o) const {
    if (linkage != o.linkage) return linkage < o.linkage;
    if (lo != o.lo) return lo < o.lo;
    return hi < o.hi;
  }
};

}  // namespace

AgglomerativeResult agglomerative_cluster(const DissimilarityMatrix& dm,
                                          int target_k) {
  const int n = dm.n;
  if (n <= 0) {
    fail("agglomerative clustering needs a non-empty matrix");
  }
  if (target_k < 1 || target_k > n) {
    fail("agglomerative target of ", target_k, " clusters is outside [1, ", n,
         "]");
  }

  // Running pairwise sums in double precision; linkage(A, B) is
  // sums[a][b] / (|A| * |B|), merges add sums without revisiting members.
  std::vector<double> sums(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      sums[static_cast<std::size_t>(i) * n + j] =
          static_cast<double>(dm.at(i, j));
    }
  }
  auto sum_at = [&](int i, int j) -> double& {
    return sums[static_cast<std::size_t>(i) * n + j];
  };

  std::vector<int> size(n, 1);
  std::vector<std::vector<int>> members(n);
  std::vector<char> alive(n, 1);
  for (int i = 0; i < n; ++i) {
    members[i] = {i};
  }
  // members[c] stays sorted, so members[c][0] is the cluster's smallest
  // member and doubles as its tie-break identity.

  auto pair_key = [&](int a, int b) {
    const double linkage =
        sum_at(a, b) / (static_cast<double>(size[a]) * size[b]);
    const int ma = members[a][0];
    const int mb = members[b][0];
    return PairKey{linkage, std::min(ma, mb), std::max(ma, mb)};
  };

  std::vector<int> best_other(n, -1);
  std::vector<PairKey> best_key(n);
  auto rescan = [&](int a) {
    best_other[a] = -1;
    for (int b = 0; b < n; ++b) {
      if (b == a || !alive[b]) continue;
      const PairKey k = pair_key(a, b);
      if (best_other[a] < 0 || k < best_key[a]) {
        best_other[a] = b;
        best_key[a] = k;
      }
    }
  };
  for (int i = 0; i < n; ++i) {
    if (n > 1) rescan(i);
  }

  AgglomerativeResult result;
  int n_clusters = n;
  while (n_clusters > target_k) {
    int pick = -1;
    for (int i = 0; i < n; ++i) {
      if (!alive[i] || best_other[i] < 0) continue;
      if (pick < 0 || best_key[i] < best_key[pick]) {
        pick = i;
      }
    }
    int a = pick;
    int b = best_other[pick];
    if (members[b][0] < members[a][0]) std::swap(a, b);

    result.merges.push_back(
        {best_key[pick].linkage, members[a][0], members[b][0]});

    std::vector<int> merged;
    merged.reserve(members[a].size() + members[b].size());
    std::merge(members[a].begin(), members[a].end(), members[b].begin(),
               members[b].end(), std::back_inserter(merged));
    members[a] = std::move(merged);
    members[b].clear();
    size[a] += size[b];
    alive[b] = 0;
    --n_clusters;

    for (int c = 0; c < n; ++c) {
      if (!alive[c] || c == a) continue;
      const double s = sum_at(a, c) + sum_at(b, c);
      sum_at(a, c) = s;
      sum_at(c, a) = s;
    }

    if (n_clusters <= target_k) break;

    rescan(a);
    for (int c = 0; c < n; ++c) {
      if (!alive[c] || c == a) continue;
      if (best_other[c] == a || best_other[c] == b) {
        rescan(c);
      } else {
        const PairKey k = pair_key(c, a);
        if (k < best_key[c]) {
          best_other[c] = a;
          best_key[c] = k;
        }
      }
    }
  }

  for (int i = 0; i < n; ++i) {
    if (alive[i]) result.clusters.push_back(std::move(members[i]));
  }
  std::sort(result.clusters.begin(), result.clusters.end(),
            [](const std::vector<int>& x, const std::vector<int>& y) {
              return x[0] < y[0];
            });
  return result;
}

int cluster_median(const std::vector<int>& members,
                   const DissimilarityMatrix& dm) {
  if (members.empty()) {
    fail("median of an empty cluster");
  }
  int best = -1;
  double best_sum = std::numeric_limits<double>::infinity();
  for (int i : members) {
    double s = 0.0;
    for (int j : members) {
      s += static_cast<double>(dm.at(i, j));
    }
    if (best < 0 || s < best_sum || (s == best_sum && i < best)) {
      best = i;
      best_sum = s;
    }
  }
  return best;
}

namespace {

std::vector<GraphFeature> subsample_pool(std::vector<GraphFeature> pool,
                                         std::size_t cap) {
  if (cap == 0 || pool.size() <= cap) return pool;
  std::vector<GraphFeature> out;
  out.reserve(cap);
  for (std::size_t i = 0; i < cap; ++i) {
    out.push_back(std::move(pool[i * pool.size() / cap]));
  }
  return out;
}

}  // namespace

Dictionary build_dictionary_two_pass(
    const std::map<std::string, std::vector<GraphFeature>>& features_at_layer,
    const DatasetManifest& manifest, int layer, int first_pass_k,
    int final_size, const CdkParams& params, std::size_t subsample_cap,
    std::size_t threads, const std::string& params_hash) {
  if (!valid_layer(layer)) {
    fail("dictionary requested for unknown layer ", layer);
  }
  if (first_pass_k < 1) {
    fail("first_pass_k must be positive, got ", first_pass_k);
  }
  if (final_size < 1) {
    fail("dictionary size must be positive, got ", final_size);
  }

  Dictionary dict;
  dict.layer = layer;
  dict.params_hash = params_hash;

  std::vector<std::string> categories;
  for (const ImageEntry& img : manifest.images) {
    if (std::find(categories.begin(), categories.end(), img.category) ==
        categories.end()) {
      categories.push_back(img.category);
    }
  }
  std::sort(categories.begin(), categories.end());

  std::vector<GraphFeature> medians;
  std::vector<std::pair<std::string, int>> origins;
  for (const std::string& cat : categories) {
    std::vector<GraphFeature> pool;
    for (const ImageEntry& img : manifest.images) {
      if (img.category != cat || img.role != "train") continue;
      auto it = features_at_layer.find(img.id);
      if (it == features_at_layer.end()) {
        fail("no layer-", layer, " features for train image '", img.id, "'");
      }
      for (const GraphFeature& g : it->second) {
        if (g.layer != layer) {
          fail("image '", img.id, "' supplied a layer-", g.layer,
               " feature to the layer-", layer, " dictionary");
        }
        pool.push_back(g);
      }
    }
    dict.category_feature_counts[cat] = static_cast<int>(pool.size());
    if (pool.empty()) {
      dict.category_median_counts[cat] = 0;
      continue;
    }
    pool = subsample_pool(std::move(pool), subsample_cap);

    const int k1 = std::min<int>(first_pass_k, static_cast<int>(pool.size()));
    const DissimilarityMatrix dm =
        compute_dissimilarity_matrix(pool, params, threads);
    const AgglomerativeResult part = agglomerative_cluster(dm, k1);
    for (std::size_t ci = 0; ci < part.clusters.size(); ++ci) {
      const int m = cluster_median(part.clusters[ci], dm);
      medians.push_back(pool[m]);
      origins.emplace_back(cat, static_cast<int>(ci));
    }
    dict.category_median_counts[cat] =
        static_cast<int>(part.clusters.size());
  }

  if (medians.empty()) {
    fail("no train features available at layer ", layer,
         "; cannot build a dictionary");
  }

  if (final_size >= static_cast<int>(medians.size())) {
    dict.undersized = final_size > static_cast<int>(medians.size());
    dict.words = std::move(medians);
    dict.word_origins = std::move(origins);
    return dict;
  }

  const DissimilarityMatrix dm2 =
      compute_dissimilarity_matrix(medians, params, threads);
  const AgglomerativeResult part2 = agglomerative_cluster(dm2, final_size);
  std::vector<int> picked;
  picked.reserve(part2.clusters.size());
  for (const std::vector<int>& cluster : part2.clusters) {
    picked.push_back(cluster_median(cluster, dm2));
  }
  std::sort(picked.begin(), picked.end());
  for (int idx : picked) {
    dict.words.push_back(medians[idx]);
    dict.word_origins.push_back(origins[idx]);
  }
  return dict;
}

}  // namespace lgw
