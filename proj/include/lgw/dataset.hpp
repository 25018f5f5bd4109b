#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace lgw {

struct Keypoint {
  double x = 0.0;
  double y = 0.0;
  double response = 0.0;
  std::vector<double> desc;
};

/// [xmin, ymin, xmax, ymax], inclusive on all sides.
using Bbox = std::array<double, 4>;

struct ImageEntry {
  std::string id;
  std::string category;
  std::string role;  // "train" or "test"
  std::string features;
  std::optional<Bbox> bbox;
};

struct DatasetManifest {
  int descriptor_dim = 0;
  std::vector<ImageEntry> images;
};

struct ImageFeatures {
  std::string image_id;
  std::vector<Keypoint> keypoints;
};

}  // namespace lgw
