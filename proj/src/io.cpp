#include "lgw/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "lgw/config.hpp"
#include "lgw/error.hpp"

namespace lgw {
namespace {

using nlohmann::json;

json parse_json(const std::string& text, const std::filesystem::path& path) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) {
    fail("'", path.string(), "' is not valid JSON");
  }
  return j;
}

json read_json(const std::filesystem::path& path) {
  return parse_json(read_text_file(path), path);
}

void write_json(const std::filesystem::path& path, const json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

void check_hash(const json& j, const char* key,
                const std::filesystem::path& path,
                const std::string& expect) {
  if (!j.contains(key) || !j[key].is_string()) {
    fail("'", path.string(), "' lacks the ", key, " field");
  }
  const std::string got = j[key].get<std::string>();
  if (got != expect) {
    fail("'", path.string(), "' was produced under config ", got,
         " but the current config hash is ", expect,
         "; re-run the producing stage");
  }
}

json graph_to_json(const GraphFeature& g, bool with_image_id) {
  json edges = json::array();
  for (const auto& [a, b] : g.edges) {
    edges.push_back(json::array({a, b}));
  }
  json out{{"seed", g.seed_index}, {"nodes", g.nodes}, {"edges", edges}};
  if (with_image_id) out["image_id"] = g.image_id;
  return out;
}

GraphFeature graph_from_json(const json& j, int layer,
                             const std::string& image_id,
                             const std::filesystem::path& path) {
  if (!j.is_object() || !j.contains("seed") || !j.contains("nodes") ||
      !j.contains("edges")) {
    fail("'", path.string(), "': graph entries need seed, nodes, edges");
  }
  GraphFeature g;
  g.layer = layer;
  g.image_id = image_id;
  g.seed_index = j["seed"].get<int>();
  for (const json& node : j["nodes"]) {
    g.nodes.push_back(node.get<std::vector<double>>());
  }
  for (const json& e : j["edges"]) {
    if (!e.is_array() || e.size() != 2) {
      fail("'", path.string(), "': edges must be [a, b] pairs");
    }
    g.edges.emplace_back(e[0].get<int>(), e[1].get<int>());
  }
  return g;
}

}  // namespace

void write_graph_file(const std::filesystem::path& path,
                      const std::string& image_id, const GraphLayers& graphs,
                      const std::string& config_hash) {
  json layers = json::object();
  for (const auto& [layer, feats] : graphs.layers) {
    json arr = json::array();
    for (const GraphFeature& g : feats) {
      arr.push_back(graph_to_json(g, false));
    }
    layers[std::to_string(layer)] = std::move(arr);
  }
  write_json(path, json{{"image_id", image_id},
                        {"config_hash", config_hash},
                        {"layers", layers}});
}

std::map<int, std::vector<GraphFeature>> read_graph_file(
    const std::filesystem::path& path, const std::string& image_id,
    const std::string& expect_hash) {
  const json j = read_json(path);
  check_hash(j, "config_hash", path, expect_hash);
  if (!j.contains("image_id") ||
      j["image_id"].get<std::string>() != image_id) {
    fail("'", path.string(), "' does not belong to image '", image_id, "'");
  }
  if (!j.contains("layers") || !j["layers"].is_object()) {
    fail("'", path.string(), "' lacks the layers map");
  }
  std::map<int, std::vector<GraphFeature>> out;
  for (const auto& [key, arr] : j["layers"].items()) {
    int layer = 0;
    try {
      layer = std::stoi(key);
    } catch (const std::exception&) {
      fail("'", path.string(), "': layer key '", key, "' is not a number");
    }
    if (!valid_layer(layer)) {
      fail("'", path.string(), "': unknown layer ", layer);
    }
    std::vector<GraphFeature>& feats = out[layer];
    for (const json& g : arr) {
      feats.push_back(graph_from_json(g, layer, image_id, path));
    }
  }
  return out;
}

void write_build_log(const std::filesystem::path& path,
                     const std::map<std::string, BuildLog>& logs,
                     const std::string& config_hash) {
  json images = json::object();
  for (const auto& [id, log] : logs) {
    json skipped = json::object();
    for (const auto& [layer, count] : log.skipped) {
      skipped[std::to_string(layer)] = count;
    }
    images[id] = json{{"skipped", skipped}};
  }
  write_json(path, json{{"config_hash", config_hash}, {"images", images}});
}

void write_dictionary_file(const std::filesystem::path& path,
                           const Dictionary& dict,
                           const std::vector<std::string>& config_echo) {
  json words = json::array();
  for (const GraphFeature& w : dict.words) {
    words.push_back(graph_to_json(w, true));
  }
  json origins = json::array();
  for (const auto& [cat, idx] : dict.word_origins) {
    origins.push_back(json::array({cat, idx}));
  }
  json metadata{{"category_feature_counts", dict.category_feature_counts},
                {"category_median_counts", dict.category_median_counts},
                {"word_origins", origins},
                {"undersized", dict.undersized},
                {"config_echo", config_echo}};
  write_json(path, json{{"layer", dict.layer},
                        {"params_hash", dict.params_hash},
                        {"words", words},
                        {"metadata", metadata}});
}

Dictionary read_dictionary_file(const std::filesystem::path& path,
                                const std::string& expect_hash) {
  const json j = read_json(path);
  check_hash(j, "params_hash", path, expect_hash);
  if (!j.contains("layer") || !j["layer"].is_number_integer()) {
    fail("'", path.string(), "' lacks the layer field");
  }
  Dictionary dict;
  dict.layer = j["layer"].get<int>();
  dict.params_hash = j["params_hash"].get<std::string>();
  if (!j.contains("words") || !j["words"].is_array() || j["words"].empty()) {
    fail("'", path.string(), "' has no words");
  }
  for (const json& w : j["words"]) {
    std::string image_id;
    if (w.contains("image_id")) image_id = w["image_id"].get<std::string>();
    dict.words.push_back(graph_from_json(w, dict.layer, image_id, path));
  }
  if (j.contains("metadata")) {
    const json& meta = j["metadata"];
    if (meta.contains("undersized")) {
      dict.undersized = meta["undersized"].get<bool>();
    }
    if (meta.contains("word_origins")) {
      for (const json& o : meta["word_origins"]) {
        dict.word_origins.emplace_back(o.at(0).get<std::string>(),
                                       o.at(1).get<int>());
      }
    }
    if (meta.contains("category_feature_counts")) {
      dict.category_feature_counts =
          meta["category_feature_counts"].get<std::map<std::string, int>>();
    }
    if (meta.contains("category_median_counts")) {
      dict.category_median_counts =
          meta["category_median_counts"].get<std::map<std::string, int>>();
    }
  }
  return dict;
}

void write_centroid_file(const std::filesystem::path& path,
                         const std::vector<std::vector<double>>& centroids,
                         const std::string& config_hash,
                         const std::vector<std::string>& config_echo) {
  write_json(path, json{{"config_hash", config_hash},
                        {"centroids", centroids},
                        {"metadata", json{{"k", centroids.size()},
                                          {"config_echo", config_echo}}}});
}

std::vector<std::vector<double>> read_centroid_file(
    const std::filesystem::path& path, const std::string& expect_hash) {
  const json j = read_json(path);
  check_hash(j, "config_hash", path, expect_hash);
  if (!j.contains("centroids") || !j["centroids"].is_array() ||
      j["centroids"].empty()) {
    fail("'", path.string(), "' has no centroids");
  }
  std::vector<std::vector<double>> out;
  for (const json& c : j["centroids"]) {
    out.push_back(c.get<std::vector<double>>());
  }
  return out;
}

void write_signature_file(const std::filesystem::path& path,
                          const Signature& sig,
                          const std::string& config_hash) {
  json blocks = json::array();
  for (const SignatureBlock& b : sig.blocks) {
    blocks.push_back(json{{"tag", b.tag}, {"values", b.values}});
  }
  write_json(path, json{{"image_id", sig.image_id},
                        {"config_hash", config_hash},
                        {"blocks", blocks}});
}

Signature read_signature_file(const std::filesystem::path& path,
                              const std::string& expect_hash) {
  const json j = read_json(path);
  check_hash(j, "config_hash", path, expect_hash);
  Signature sig;
  if (!j.contains("image_id") || !j["image_id"].is_string()) {
    fail("'", path.string(), "' lacks the image_id field");
  }
  sig.image_id = j["image_id"].get<std::string>();
  if (!j.contains("blocks") || !j["blocks"].is_array() ||
      j["blocks"].empty()) {
    fail("'", path.string(), "' has no signature blocks");
  }
  for (const json& b : j["blocks"]) {
    if (!b.contains("tag") || !b.contains("values")) {
      fail("'", path.string(), "': blocks need tag and values");
    }
    sig.blocks.push_back(
        {b["tag"].get<std::string>(), b["values"].get<std::vector<double>>()});
  }
  return sig;
}

void write_report_file(const std::filesystem::path& path,
                       const std::map<std::string, EvalReport>& by_method,
                       const std::string& config_hash,
                       const std::vector<std::string>& config_echo) {
  json methods = json::object();
  for (const auto& [name, report] : by_method) {
    methods[name] = json{{"per_query_ap", report.per_query_ap},
                         {"per_category_map", report.per_category_map},
                         {"dataset_map", report.dataset_map},
                         {"skipped_categories", report.skipped_categories}};
  }
  write_json(path, json{{"config_hash", config_hash},
                        {"config_echo", config_echo},
                        {"methods", methods}});
}

std::string dataset_hash_hex(const std::filesystem::path& manifest_path,
                             const DatasetManifest& manifest) {
  std::uint64_t h = fnv1a64(read_text_file(manifest_path));
  for (const ImageEntry& img : manifest.images) {
    h = fnv1a64(img.id, h);
    h = fnv1a64(read_text_file(img.features), h);
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return std::string(buf);
}

void write_text_file(const std::filesystem::path& path,
                     const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    fail("cannot open '", path.string(), "' for writing");
  }
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) {
    fail("failed writing '", path.string(), "'");
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    fail("cannot open '", path.string(), "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace lgw
