#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lgw/cdk.hpp"
#include "lgw/dataset.hpp"
#include "lgw/graph.hpp"

namespace lgw {

/// Symmetric rho matrix with zero diagonal. Values are held at 32-bit
/// precision; every downstream comparison and tie-break reads these stored
/// values.
struct DissimilarityMatrix {
  int n = 0;
  std::vector<float> values;

  float at(int i, int j) const {
    return values[static_cast<std::size_t>(i) * n + j];
  }
};

/// Fills the full matrix, computing each unordered pair once. Throws when
/// items.size() exceeds max_items (the memory guard; subsample first).
DissimilarityMatrix compute_dissimilarity_matrix(
    const std::vector<GraphFeature>& items, const CdkParams& params,
    std::size_t threads, std::size_t max_items = 20000);

struct MergeRecord {
  double linkage;
  int a_min;
  int b_min;
};

struct AgglomerativeResult {
  /// Clusters sorted by smallest member; members ascending.
  std::vector<std::vector<int>> clusters;
  /// One record per merge, in merge order, for audit.
  std::vector<MergeRecord> merges;
};

/// Average-linkage agglomerative clustering from singletons down to
/// target_k clusters. Linkage ties break on the pair of smallest member
/// indices. Deterministic.
AgglomerativeResult agglomerative_cluster(const DissimilarityMatrix& dm,
                                          int target_k);

/// The member minimizing the summed rho to all members; ties take the
/// smallest index.
int cluster_median(const std::vector<int>& members,
                   const DissimilarityMatrix& dm);

struct Dictionary {
  int layer = 0;
  std::string params_hash;
  std::vector<GraphFeature> words;
  /// (category, first-pass cluster index) of each word's median, words are
  /// ordered by this pair.
  std::vector<std::pair<std::string, int>> word_origins;
  std::map<std::string, int> category_feature_counts;
  std::map<std::string, int> category_median_counts;
  /// Set when final_size exceeded the available median count and the
  /// dictionary kept all medians instead.
  bool undersized = false;
};

/// Two-pass build: per-category clustering of that category's train
/// features to min(first_pass_k, pool) clusters, median per cluster; then
/// one global clustering of all medians to final_size, median per cluster.
/// features_at_layer maps image_id to that image's layer-`layer` features.
Dictionary build_dictionary_two_pass(
    const std::map<std::string, std::vector<GraphFeature>>& features_at_layer,
    const DatasetManifest& manifest, int layer, int first_pass_k,
    int final_size, const CdkParams& params, std::size_t subsample_cap,
    std::size_t threads, const std::string& params_hash);

/// Lloyd k-means over unit-norm descriptors with deterministic seeded
/// initialization; empty clusters re-seed from the farthest point.
std::vector<std::vector<double>> kmeans_baseline_dictionary(
    const std::vector<std::vector<double>>& descriptors, int k,
    std::uint64_t rng_seed, int max_iters);

}  // namespace lgw
