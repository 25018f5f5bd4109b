#pragma once

#include <string>
#include <utility>
#include <vector>

namespace lgw {

/// Valid nesting levels: a layer-L graph is a seed plus its L nearest
/// neighbors.
inline constexpr int kLayers[4] = {0, 3, 6, 9};

inline bool valid_layer(int layer) {
  return layer == 0 || layer == 3 || layer == 6 || layer == 9;
}

/// One local graph word candidate: the seed's descriptor first, then the
/// neighbors in increasing spatial distance. Edges are undirected (a, b)
/// pairs with a < b over local node indices, sorted lexicographically;
/// layer 0 has none. node_indices carries the source keypoint index of each
/// node (same order as nodes); it is derivable context, not serialized.
struct GraphFeature {
  int layer = 0;
  int seed_index = -1;
  std::vector<std::vector<double>> nodes;
  std::vector<std::pair<int, int>> edges;
  std::string image_id;
  std::vector<int> node_indices;
};

}  // namespace lgw
