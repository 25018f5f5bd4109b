#include "lgw/synthetic.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <vector>

#include "lgw/error.hpp"
#include "lgw/ingest.hpp"
#include "lgw/rng.hpp"

namespace lgw {

namespace {

constexpr int kClusters = 3;
constexpr double kDescNoise = 0.1;

std::vector<double> unit_gaussian(Rng& rng, int dim) {
  std::vector<double> v(dim);
  double sq = 0.0;
  for (double& e : v) {
    e = rng.gaussian();
    sq += e * e;
  }
  if (sq == 0.0) fail("synthetic: degenerate zero direction");
  double inv = 1.0 / std::sqrt(sq);
  for (double& e : v) e *= inv;
  return v;
}

std::vector<double> normalized(std::vector<double> v) {
  double sq = 0.0;
  for (double e : v) sq += e * e;
  if (sq == 0.0) fail("synthetic: zero-norm descriptor sample");
  double inv = 1.0 / std::sqrt(sq);
  for (double& e : v) e *= inv;
  return v;
}

std::string pad(int value, int width) {
  std::string s = std::to_string(value);
  while (static_cast<int>(s.size()) < width) s.insert(s.begin(), '0');
  return s;
}

}  // namespace

DatasetManifest generate_synthetic_dataset(
    const SyntheticSpec& spec, std::uint64_t rng_seed,
    const std::filesystem::path& out_dir) {
  if (spec.n_categories <= 0 || spec.images_per_category <= 0 ||
      spec.keypoints_per_image <= 0 || spec.descriptor_dim <= 0) {
    fail("synthetic: all counts must be positive");
  }
  if (spec.keypoints_per_image < 10) {
    fail("synthetic: keypoints_per_image must be >= 10 (the top layer ",
         "needs a seed plus 9 neighbors), got ", spec.keypoints_per_image);
  }
  if (spec.train_per_category < 1 ||
      spec.train_per_category >= spec.images_per_category) {
    fail("synthetic: train_per_category must be in [1, images_per_category)");
  }
  if (spec.cluster_separation < 0.0) {
    fail("synthetic: cluster_separation must be >= 0");
  }

  std::filesystem::create_directories(out_dir);
  Rng rng(rng_seed);
  const int dim = spec.descriptor_dim;
  const double sep = spec.cluster_separation;

  // Shared base: cluster directions on the unit sphere and planar anchors.
  std::vector<std::vector<double>> base_center(kClusters);
  std::vector<std::pair<double, double>> base_anchor(kClusters);
  for (int k = 0; k < kClusters; ++k) base_center[k] = unit_gaussian(rng, dim);
  for (int k = 0; k < kClusters; ++k) {
    base_anchor[k] = {rng.uniform(20.0, 80.0), rng.uniform(20.0, 80.0)};
  }

  // Per-category offsets, scaled by the separation in both spaces.
  std::vector<std::vector<std::vector<double>>> center(spec.n_categories);
  std::vector<std::vector<std::pair<double, double>>> anchor(
      spec.n_categories);
  for (int c = 0; c < spec.n_categories; ++c) {
    center[c].resize(kClusters);
    anchor[c].resize(kClusters);
    for (int k = 0; k < kClusters; ++k) {
      std::vector<double> dir = unit_gaussian(rng, dim);
      std::vector<double> v = base_center[k];
      for (int e = 0; e < dim; ++e) v[e] += sep * dir[e];
      center[c][k] = normalized(std::move(v));
    }
    for (int k = 0; k < kClusters; ++k) {
      double ox = rng.uniform(-10.0, 10.0);
      double oy = rng.uniform(-10.0, 10.0);
      anchor[c][k] = {base_anchor[k].first + sep * ox,
                      base_anchor[k].second + sep * oy};
    }
  }

  nlohmann::json images = nlohmann::json::array();
  for (int c = 0; c < spec.n_categories; ++c) {
    std::string category = "cat" + pad(c, 2);
    for (int i = 0; i < spec.images_per_category; ++i) {
      std::string id = category + "_img" + pad(i, 3);
      double shift_x = rng.uniform(-5.0, 5.0);
      double shift_y = rng.uniform(-5.0, 5.0);
      std::vector<Keypoint> kps;
      kps.reserve(spec.keypoints_per_image);
      for (int p = 0; p < spec.keypoints_per_image; ++p) {
        int m = static_cast<int>(rng.uniform_index(kClusters));
        Keypoint kp;
        std::vector<double> d = center[c][m];
        for (int e = 0; e < dim; ++e) d[e] += kDescNoise * rng.gaussian();
        kp.desc = normalized(std::move(d));
        kp.x = anchor[c][m].first + shift_x + rng.uniform(-8.0, 8.0);
        kp.y = anchor[c][m].second + shift_y + rng.uniform(-8.0, 8.0);
        kp.response = rng.uniform01();
        kps.push_back(std::move(kp));
      }
      std::string fname = id + ".jsonl";
      write_keypoints(out_dir / fname, kps);
      images.push_back({{"id", id},
                        {"category", category},
                        {"role", i < spec.train_per_category ? "train"
                                                             : "test"},
                        {"features", fname}});
    }
  }

  nlohmann::json manifest;
  manifest["descriptor_dim"] = dim;
  manifest["images"] = images;
  std::filesystem::path mpath = out_dir / "manifest.json";
  std::ofstream out(mpath, std::ios::trunc);
  if (!out) fail("cannot write ", mpath.string());
  out << manifest.dump(2) << '\n';
  out.close();

  return load_manifest(mpath);
}

}  // namespace lgw
