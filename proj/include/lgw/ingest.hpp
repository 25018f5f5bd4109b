#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "lgw/dataset.hpp"

namespace lgw {

/// Loads and validates a dataset manifest. Relative feature paths resolve
/// against the manifest's directory; every referenced file must exist, every
/// image_id must be unique, roles must be train/test, and every category
/// needs at least one train image.
DatasetManifest load_manifest(const std::filesystem::path& path);

/// Loads one keypoint file (JSON Lines). Keypoints outside the bbox (when
/// given) are dropped, surviving descriptors are rescaled to unit L2 norm,
/// and file order is preserved. Validation failures name the record index.
std::vector<Keypoint> load_keypoints(const std::filesystem::path& path,
                                     const std::optional<Bbox>& bbox,
                                     int descriptor_dim);

/// Writes keypoints in the same JSON Lines format with round-trip number
/// precision, so load -> write_keypoints -> load is the identity.
void write_keypoints(const std::filesystem::path& path,
                     const std::vector<Keypoint>& kps);

}  // namespace lgw
