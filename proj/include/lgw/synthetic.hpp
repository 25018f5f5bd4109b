#pragma once

#include <cstdint>
#include <filesystem>

#include "lgw/dataset.hpp"

namespace lgw {

struct SyntheticSpec {
  int n_categories = 3;
  int images_per_category = 15;
  int train_per_category = 10;
  int keypoints_per_image = 60;
  int descriptor_dim = 64;
  double cluster_separation = 2.0;
};

/// Writes a synthetic dataset (manifest.json plus one JSONL feature file per
/// image) into out_dir and returns the validated manifest. Each category
/// draws descriptors from its own mixture of unit-sphere clusters and
/// keypoint positions from a category-specific planar layout; the separation
/// parameter scales both the descriptor and the layout offsets away from a
/// shared base, so separation 0 makes all categories one distribution.
/// Deterministic: a given (spec, rng_seed) always produces byte-identical
/// files.
DatasetManifest generate_synthetic_dataset(const SyntheticSpec& spec,
                                           std::uint64_t rng_seed,
                                           const std::filesystem::path& out_dir);

}  // namespace lgw
