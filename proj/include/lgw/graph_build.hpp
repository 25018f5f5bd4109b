#pragma once

#include <map>
#include <optional>
#include <vector>

#include "lgw/dataset.hpp"
#include "lgw/graph.hpp"

namespace lgw {

/// Indices of the min(n_seeds, |keypoints|) keypoints with the highest
/// responses, sorted by (response descending, index ascending).
std::vector<int> select_seeds(const std::vector<Keypoint>& keypoints,
                              int n_seeds);

/// The k indices nearest to the seed in the image plane, ordered by
/// (distance ascending, index ascending), excluding the seed itself.
/// Returns nullopt when fewer than k other keypoints exist (the caller
/// skips this seed at this layer).
std::optional<std::vector<int>> find_neighbors(
    const std::vector<Keypoint>& keypoints, int seed_index, int k);

struct GraphBuildParams {
  int n_seeds = 300;
  std::vector<int> layers = {0, 3, 6, 9};
};

/// Per-layer count of seeds that had too few neighbors for a graph.
struct BuildLog {
  std::map<int, int> skipped;
};

struct GraphLayers {
  std::map<int, std::vector<GraphFeature>> layers;
  BuildLog log;
};

/// Builds every requested layer for every seed of the image. Coincident
/// keypoints are collapsed to their lowest-index representative before seed
/// selection and neighbor search, so triangulations always see distinct
/// points. Node sets nest upward across layers for a given seed.
GraphLayers build_graph_layers(const ImageFeatures& image,
                               const GraphBuildParams& params);

}  // namespace lgw
