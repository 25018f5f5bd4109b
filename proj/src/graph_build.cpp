#include "lgw/graph_build.hpp"

#include <algorithm>
#include <numeric>

#include "lgw/delaunay.hpp"
#include "lgw/error.hpp"
#include "lgw/geometry.hpp"

namespace lgw {

std::vector<int> select_seeds(const std::vector<Keypoint>& keypoints,
                              int n_seeds) {
  if (keypoints.empty()) fail("image has no features");
  if (n_seeds <= 0) fail("n_seeds must be positive");
  std::vector<int> idx(keypoints.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    if (keypoints[a].response != keypoints[b].response) {
      return keypoints[a].response > keypoints[b].response;
    }
    return a < b;
  });
  idx.resize(std::min<std::size_t>(n_seeds, idx.size()));
  return idx;
}

std::optional<std::vector<int>> find_neighbors(
    const std::vector<Keypoint>& keypoints, int seed_index, int k) {
  if (seed_index < 0 || seed_index >= static_cast<int>(keypoints.size())) {
    fail("find_neighbors: seed index ", seed_index, " out of range");
  }
  if (k <= 0) fail("find_neighbors: k must be positive");
  if (static_cast<int>(keypoints.size()) < k + 1) return std::nullopt;

  const Pt seed{keypoints[seed_index].x, keypoints[seed_index].y};
  std::vector<int> idx;
  idx.reserve(keypoints.size() - 1);
  for (int i = 0; i < static_cast<int>(keypoints.size()); ++i) {
    if (i != seed_index) idx.push_back(i);
  }
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    double da = sq_dist(seed, Pt{keypoints[a].x, keypoints[a].y});
    double db = sq_dist(seed, Pt{keypoints[b].x, keypoints[b].y});
    if (da != db) return da < db;
    return a < b;
  });
  idx.resize(k);
  return idx;
}

GraphLayers build_graph_layers(const ImageFeatures& image,
                               const GraphBuildParams& params) {
  if (image.keypoints.empty()) fail("image has no features");
  for (int layer : params.layers) {
    if (!valid_layer(layer)) {
      fail("invalid layer ", layer, " (expected 0, 3, 6, or 9)");
    }
  }

  // Collapse coincident positions to the lowest-index keypoint.
  const auto& kps = image.keypoints;
  std::vector<int> by_pos(kps.size());
  std::iota(by_pos.begin(), by_pos.end(), 0);
  std::sort(by_pos.begin(), by_pos.end(), [&](int a, int b) {
    if (kps[a].x != kps[b].x) return kps[a].x < kps[b].x;
    if (kps[a].y != kps[b].y) return kps[a].y < kps[b].y;
    return a < b;
  });
  std::vector<int> active;
  active.reserve(kps.size());
  for (std::size_t i = 0; i < by_pos.size(); ++i) {
    if (i > 0 && kps[by_pos[i]].x == kps[by_pos[i - 1]].x &&
        kps[by_pos[i]].y == kps[by_pos[i - 1]].y) {
      continue;
    }
    active.push_back(by_pos[i]);
  }
  std::sort(active.begin(), active.end());

  std::vector<Keypoint> compact;
  compact.reserve(active.size());
  for (int i : active) compact.push_back(kps[i]);

  std::vector<int> seeds = select_seeds(compact, params.n_seeds);

  GraphLayers out;
  for (int layer : params.layers) out.layers[layer] = {};

  for (int s : seeds) {
    for (int layer : params.layers) {
      if (layer == 0) {
        GraphFeature g;
        g.layer = 0;
        g.seed_index = active[s];
        g.image_id = image.image_id;
        g.nodes = {compact[s].desc};
        g.node_indices = {active[s]};
        out.layers[0].push_back(std::move(g));
        continue;
      }
      auto nbrs = find_neighbors(compact, s, layer);
      if (!nbrs) {
        ++out.log.skipped[layer];
        continue;
      }
      GraphFeature g;
      g.layer = layer;
      g.seed_index = active[s];
      g.image_id = image.image_id;
      g.nodes.reserve(layer + 1);
      g.node_indices.reserve(layer + 1);
      std::vector<Pt> pts;
      pts.reserve(layer + 1);
      g.nodes.push_back(compact[s].desc);
      g.node_indices.push_back(active[s]);
      pts.push_back({compact[s].x, compact[s].y});
      for (int nb : *nbrs) {
        g.nodes.push_back(compact[nb].desc);
        g.node_indices.push_back(active[nb]);
        pts.push_back({compact[nb].x, compact[nb].y});
      }
      g.edges = delaunay_triangulate(pts);
      out.layers[layer].push_back(std::move(g));
    }
  }
  return out;
}

}  // namespace lgw
