#include "lgw/ingest.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "lgw/error.hpp"

namespace lgw {

namespace {

using nlohmann::json;

json parse_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open ", path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    fail(path.string(), ": ", e.what());
  }
}

double require_number(const json& j, const char* key, const std::string& ctx) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_number()) {
    fail(ctx, ": missing or non-numeric field '", key, "'");
  }
  double v = it->get<double>();
  if (!std::isfinite(v)) fail(ctx, ": non-finite value in field '", key, "'");
  return v;
}

}  // namespace

DatasetManifest load_manifest(const std::filesystem::path& path) {
  json j = parse_json_file(path);
  const std::string ctx = path.string();
  if (!j.is_object()) fail(ctx, ": manifest must be a JSON object");
  if (!j.contains("descriptor_dim") ||
      !j["descriptor_dim"].is_number_integer()) {
    fail(ctx, ": missing integer field 'descriptor_dim'");
  }
  DatasetManifest m;
  m.descriptor_dim = j["descriptor_dim"].get<int>();
  if (m.descriptor_dim <= 0) fail(ctx, ": descriptor_dim must be positive");
  if (!j.contains("images") || !j["images"].is_array()) {
    fail(ctx, ": missing array field 'images'");
  }

  std::set<std::string> seen_ids;
  std::filesystem::path base = path.parent_path();
  for (std::size_t i = 0; i < j["images"].size(); ++i) {
    const json& e = j["images"][i];
    std::string ectx = cat(ctx, ": images[", i, "]");
    if (!e.is_object()) fail(ectx, ": must be an object");
    ImageEntry entry;
    for (const char* key : {"id", "category", "role", "features"}) {
      if (!e.contains(key) || !e[key].is_string() ||
          e[key].get<std::string>().empty()) {
        fail(ectx, ": missing string field '", key, "'");
      }
    }
    entry.id = e["id"].get<std::string>();
    entry.category = e["category"].get<std::string>();
    entry.role = e["role"].get<std::string>();
    entry.features = e["features"].get<std::string>();
    if (entry.role != "train" && entry.role != "test") {
      fail(ectx, ": unknown role '", entry.role, "' (expected train or test)");
    }
    if (!seen_ids.insert(entry.id).second) {
      fail(ctx, ": duplicate image_id '", entry.id, "'");
    }
    if (entry.id.find('/') != std::string::npos ||
        entry.id.find('\\') != std::string::npos ||
        entry.id.find("..") != std::string::npos) {
      fail(ectx, ": image_id '", entry.id, "' contains path separators");
    }
    if (e.contains("bbox")) {
      const json& bb = e["bbox"];
      if (!bb.is_array() || bb.size() != 4) {
        fail(ectx, ": bbox must be [xmin, ymin, xmax, ymax]");
      }
      Bbox box;
      for (int k = 0; k < 4; ++k) {
        if (!bb[k].is_number()) fail(ectx, ": bbox entries must be numbers");
        box[k] = bb[k].get<double>();
      }
      if (box[0] > box[2] || box[1] > box[3]) {
        fail(ectx, ": bbox min exceeds max");
      }
      entry.bbox = box;
    }
    std::filesystem::path fp(entry.features);
    if (fp.is_relative()) fp = base / fp;
    if (!std::filesystem::exists(fp)) {
      fail(ectx, ": feature file not found: ", fp.string());
    }
    entry.features = fp.string();
    m.images.push_back(std::move(entry));
  }

  std::map<std::string, int> train_count;
  for (const auto& e : m.images) {
    if (e.role == "train") ++train_count[e.category];
  }
  for (const auto& e : m.images) {
    if (train_count[e.category] == 0) {
      fail(ctx, ": category '", e.category, "' has no train image");
    }
  }
  return m;
}

std::vector<Keypoint> load_keypoints(const std::filesystem::path& path,
                                     const std::optional<Bbox>& bbox,
                                     int descriptor_dim) {
  std::ifstream in(path);
  if (!in) fail("cannot open ", path.string());
  std::vector<Keypoint> out;
  std::string line;
  std::size_t record = 0;
  for (; std::getline(in, line); ++record) {
    if (line.empty()) continue;
    std::string ctx = cat(path.string(), ": record ", record);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      fail(ctx, ": ", e.what());
    }
    Keypoint kp;
    kp.x = require_number(j, "x", ctx);
    kp.y = require_number(j, "y", ctx);
    kp.response = require_number(j, "response", ctx);
    if (kp.response < 0.0) fail(ctx, ": negative response");
    auto it = j.find("desc");
    if (it == j.end() || !it->is_array()) {
      fail(ctx, ": missing array field 'desc'");
    }
    if (static_cast<int>(it->size()) != descriptor_dim) {
      fail(ctx, ": descriptor length ", it->size(), " does not match dim ",
           descriptor_dim);
    }
    kp.desc.resize(it->size());
    for (std::size_t k = 0; k < it->size(); ++k) {
      const json& v = (*it)[k];
      if (!v.is_number()) fail(ctx, ": non-numeric descriptor entry");
      kp.desc[k] = v.get<double>();
      if (!std::isfinite(kp.desc[k])) {
        fail(ctx, ": non-finite descriptor entry");
      }
    }

    if (bbox) {
      const Bbox& b = *bbox;
      if (kp.x < b[0] || kp.x > b[2] || kp.y < b[1] || kp.y > b[3]) continue;
    }

    double sq = 0.0;
    for (double v : kp.desc) sq += v * v;
    if (sq == 0.0) fail(ctx, ": zero-norm descriptor");
    double norm = std::sqrt(sq);
    // Already-normalized descriptors pass through untouched so that
    // load -> write-back -> load is exactly idempotent.
    if (std::fabs(norm - 1.0) > 1e-9) {
      double inv = 1.0 / norm;
      for (double& v : kp.desc) v *= inv;
    }
    out.push_back(std::move(kp));
  }
  return out;
}

void write_keypoints(const std::filesystem::path& path,
                     const std::vector<Keypoint>& kps) {
  std::ofstream outf(path, std::ios::trunc);
  if (!outf) fail("cannot write ", path.string());
  for (const Keypoint& kp : kps) {
    json j;
    j["x"] = kp.x;
    j["y"] = kp.y;
    j["response"] = kp.response;
    j["desc"] = kp.desc;
    outf << j.dump() << '\n';
  }
  if (!outf) fail("write failed: ", path.string());
}

}  // namespace lgw
