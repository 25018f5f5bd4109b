#pragma once

#include <map>
#include <string>
#include <vector>

#include "lgw/dataset.hpp"
#include "lgw/signature.hpp"

namespace lgw {

struct RankedList {
  std::string query_id;
  /// (image_id, distance), ascending distance, ties by image_id.
  std::vector<std::pair<std::string, double>> entries;
};

struct EvalReport {
  std::map<std::string, double> per_query_ap;
  std::map<std::string, double> per_category_map;
  double dataset_map = 0.0;
  /// Categories present in the manifest but lacking test queries; excluded
  /// from dataset_map.
  std::vector<std::string> skipped_categories;
};

/// Ranks the database by L1 distance to the query, ascending, ties broken
/// by image_id.
RankedList rank_database(const Signature& query,
                         const std::vector<Signature>& database);

/// Mean of precision-at-rank over the relevant items.
double average_precision(const RankedList& ranked,
                         const std::vector<std::string>& relevant);

/// Per-category mean AP over test queries plus the unweighted cross-category
/// mean. Relevance is same-category membership in the train set.
EvalReport evaluate_map(const std::vector<Signature>& test_sigs,
                        const std::vector<Signature>& train_sigs,
                        const DatasetManifest& manifest, std::size_t threads);

}  // namespace lgw
