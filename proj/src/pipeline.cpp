#include "lgw/pipeline.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "lgw/error.hpp"
#include "lgw/evaluate.hpp"
#include "lgw/graph_build.hpp"
#include "lgw/ingest.hpp"
#include "lgw/io.hpp"
#include "lgw/kernels.hpp"
#include "lgw/parallel.hpp"
#include "lgw/signature.hpp"
#include "lgw/synthetic.hpp"

namespace lgw {
namespace {

using nlohmann::json;

struct Staged {
  DatasetManifest manifest;
  std::string dataset_hash;
  std::string config_hash;
};

Staged stage(const PipelineConfig& cfg, const Workspace& ws) {
  kernels::set_backend(kernels::parse_backend(cfg.kernel_backend));
  const auto mpath = ws.features() / "manifest.json";
  const auto metapath = ws.features() / "meta.json";
  if (!std::filesystem::exists(mpath) ||
      !std::filesystem::exists(metapath)) {
    fail("workspace '", ws.root.string(),
         "' has no ingested features; run synth or ingest first");
  }
  Staged s;
  s.manifest = load_manifest(mpath);
  const json meta = json::parse(read_text_file(metapath), nullptr, false);
  if (meta.is_discarded() || !meta.contains("dataset_hash") ||
      !meta["dataset_hash"].is_string()) {
    fail("'", metapath.string(), "' is corrupt; re-run synth or ingest");
  }
  s.dataset_hash = meta["dataset_hash"].get<std::string>();
  s.config_hash = config_hash_hex(cfg, s.dataset_hash);
  return s;
}

void write_meta(const Workspace& ws, const DatasetManifest& manifest) {
  const auto mpath = ws.features() / "manifest.json";
  const json meta{{"dataset_hash", dataset_hash_hex(mpath, manifest)},
                  {"descriptor_dim", manifest.descriptor_dim},
                  {"n_images", manifest.images.size()}};
  write_text_file(ws.features() / "meta.json", meta.dump(2) + "\n");
}

std::vector<int> sorted_layers(const PipelineConfig& cfg) {
  std::vector<int> layers = cfg.layers;
  std::sort(layers.begin(), layers.end());
  return layers;
}

int top_layer(const PipelineConfig& cfg) {
  return *std::max_element(cfg.layers.begin(), cfg.layers.end());
}

bool has_layer0(const PipelineConfig& cfg) {
  return std::find(cfg.layers.begin(), cfg.layers.end(), 0) !=
         cfg.layers.end();
}

bool uses_kmeans_block(const PipelineConfig& cfg) {
  return has_layer0(cfg) && cfg.fusion == "kmeans-baseline";
}

bool uses_layer0_dict(const PipelineConfig& cfg) {
  return has_layer0(cfg) && cfg.fusion == "selected-surf";
}

/// The layer-0 features that participate in signatures: only the seeds that
/// carry a top-layer graph.
std::vector<GraphFeature> selected_layer0(
    const std::map<int, std::vector<GraphFeature>>& layers, int top) {
  auto it0 = layers.find(0);
  if (it0 == layers.end()) {
    fail("graph artifact lacks layer 0; rebuild graphs with layer 0 enabled");
  }
  if (top == 0) return it0->second;
  std::set<int> keep;
  auto it_top = layers.find(top);
  if (it_top != layers.end()) {
    for (const GraphFeature& g : it_top->second) keep.insert(g.seed_index);
  }
  std::vector<GraphFeature> out;
  for (const GraphFeature& g : it0->second) {
    if (keep.count(g.seed_index)) out.push_back(g);
  }
  return out;
}

std::map<int, std::vector<GraphFeature>> load_graphs(
    const Workspace& ws, const std::string& id, const std::string& hash) {
  const auto path = ws.graphs() / (id + ".json");
  if (!std::filesystem::exists(path)) {
    fail("no graph artifact for image '", id, "'; run graphs first");
  }
  return read_graph_file(path, id, hash);
}

std::vector<std::vector<double>> descriptors_of(
    const std::vector<Keypoint>& kps) {
  std::vector<std::vector<double>> out;
  out.reserve(kps.size());
  for (const Keypoint& kp : kps) out.push_back(kp.desc);
  return out;
}

struct DictSet {
  std::map<int, Dictionary> by_layer;
  std::vector<std::vector<double>> centroids;
};

/// Builds the configured dictionaries from train-image graphs. A positive
/// size_override replaces every configured dictionary size (sweep points).
DictSet build_dicts(
    const PipelineConfig& cfg, const DatasetManifest& manifest,
    const std::map<std::string, std::map<int, std::vector<GraphFeature>>>&
        graphs_by_image,
    const std::map<std::string, std::vector<std::vector<double>>>&
        train_descs,
    const std::string& hash, int size_override) {
  DictSet out;
  const int top = top_layer(cfg);
  for (int layer : sorted_layers(cfg)) {
    if (layer == 0 && !uses_layer0_dict(cfg)) continue;
    std::map<std::string, std::vector<GraphFeature>> feats;
    for (const auto& [id, layers] : graphs_by_image) {
      if (layer == 0) {
        feats[id] = selected_layer0(layers, top);
      } else {
        auto it = layers.find(layer);
        feats[id] = it == layers.end() ? std::vector<GraphFeature>{}
                                       : it->second;
      }
    }
    const int size =
        size_override > 0 ? size_override : cfg.dict_size_for(layer);
    out.by_layer[layer] = build_dictionary_two_pass(
        feats, manifest, layer, cfg.first_pass_k, size, cfg.cdk,
        cfg.subsample_cap, cfg.threads, hash);
  }
  if (uses_kmeans_block(cfg)) {
    std::vector<std::vector<double>> all;
    for (const ImageEntry& e : manifest.images) {
      if (e.role != "train") continue;
      const auto& descs = train_descs.at(e.id);
      all.insert(all.end(), descs.begin(), descs.end());
    }
    if (all.empty()) {
      fail("no train descriptors available for the k-means baseline");
    }
    const int want =
        size_override > 0 ? size_override : cfg.dict_size_for(0);
    const int k = std::min<int>(want, static_cast<int>(all.size()));
    out.centroids =
        kmeans_baseline_dictionary(all, k, cfg.rng_seed,
                                   cfg.kmeans_max_iters);
  }
  return out;
}

using GraphsLoader =
    std::function<std::map<int, std::vector<GraphFeature>>(const ImageEntry&)>;
using DescsLoader =
    std::function<std::vector<std::vector<double>>(const ImageEntry&)>;

std::vector<Signature> encode_all(const PipelineConfig& cfg,
                                  const DatasetManifest& manifest,
                                  const GraphsLoader& graphs_of,
                                  const DescsLoader& descs_of,
                                  const DictSet& dicts) {
  const int top = top_layer(cfg);
  std::vector<Signature> sigs(manifest.images.size());
  parallel_for(manifest.images.size(), cfg.threads, [&](std::size_t i) {
    const ImageEntry& e = manifest.images[i];
    const auto layers = graphs_of(e);
    std::vector<std::pair<std::string, std::vector<double>>> blocks;
    for (int layer : sorted_layers(cfg)) {
      if (layer == 0 && cfg.fusion == "kmeans-baseline") {
        blocks.emplace_back(
            "kmeans",
            encode_baseline_signature(descs_of(e), dicts.centroids, 1));
        continue;
      }
      std::vector<GraphFeature> feats;
      if (layer == 0) {
        feats = selected_layer0(layers, top);
      } else {
        auto it = layers.find(layer);
        if (it != layers.end()) feats = it->second;
      }
      if (feats.empty()) {
        fail("image '", e.id, "' has no usable layer-", layer,
             " graphs; it cannot be encoded");
      }
      blocks.emplace_back(
          std::to_string(layer),
          encode_layer_signature(feats, dicts.by_layer.at(layer), cfg.cdk,
                                 1));
    }
    sigs[i] = fuse_signatures(e.id, blocks);
  });
  return sigs;
}

Signature single_block(const Signature& sig, std::size_t block) {
  Signature out;
  out.image_id = sig.image_id;
  out.blocks.push_back(sig.blocks[block]);
  return out;
}

/// Per-method reports: one per signature block plus the full fusion.
std::map<std::string, EvalReport> evaluate_methods(
    const PipelineConfig& cfg, const DatasetManifest& manifest,
    const std::vector<Signature>& test_sigs,
    const std::vector<Signature>& train_sigs) {
  if (test_sigs.empty()) {
    fail("no test signatures; nothing to evaluate");
  }
  std::map<std::string, EvalReport> out;
  for (std::size_t b = 0; b < test_sigs[0].blocks.size(); ++b) {
    std::vector<Signature> t;
    std::vector<Signature> d;
    t.reserve(test_sigs.size());
    d.reserve(train_sigs.size());
    for (const Signature& s : test_sigs) t.push_back(single_block(s, b));
    for (const Signature& s : train_sigs) d.push_back(single_block(s, b));
    out["single_" + test_sigs[0].blocks[b].tag] =
        evaluate_map(t, d, manifest, cfg.threads);
  }
  out["fused"] = evaluate_map(test_sigs, train_sigs, manifest, cfg.threads);
  return out;
}

std::string fused_layer_set(const Signature& sig) {
  std::string out;
  for (std::size_t b = 0; b < sig.blocks.size(); ++b) {
    if (b) out += "+";
    out += sig.blocks[b].tag;
  }
  return out;
}

void append_csv_rows(std::string& csv, const std::string& method,
                     const std::string& layer_set, int dict_size,
                     const EvalReport& r) {
  for (const auto& [cat, m] : r.per_category_map) {
    csv += method;
    csv += ",";
    csv += layer_set;
    csv += ",";
    csv += std::to_string(dict_size);
    csv += ",";
    csv += cat;
    csv += ",";
    csv += format_double(m);
    csv += ",";
    csv += format_double(r.dataset_map);
    csv += "\n";
  }
}

/// Rows for one evaluated configuration: each single block at its size,
/// then the fusion. size_override (> 0) labels every row with the sweep
/// point's size.
void append_point_rows(std::string& csv, const PipelineConfig& cfg,
                       const Signature& shape,
                       const std::map<std::string, EvalReport>& by_method,
                       int size_override) {
  for (const SignatureBlock& block : shape.blocks) {
    const int layer = block.tag == "kmeans" ? 0 : std::stoi(block.tag);
    const int size =
        size_override > 0 ? size_override : cfg.dict_size_for(layer);
    append_csv_rows(csv, "single", block.tag, size,
                    by_method.at("single_" + block.tag));
  }
  const int fused_size = size_override > 0 ? size_override : cfg.dict_size;
  append_csv_rows(csv, "fused", fused_layer_set(shape), fused_size,
                  by_method.at("fused"));
}

constexpr const char* kCsvHeader =
    "method,layer_set,dict_size,category,map,dataset_map\n";

}  // namespace

void run_synth(const PipelineConfig& cfg, const Workspace& ws) {
  std::filesystem::create_directories(ws.features());
  const DatasetManifest m =
      generate_synthetic_dataset(cfg.synth, cfg.rng_seed, ws.features());
  write_meta(ws, m);
}

void run_ingest(const PipelineConfig& cfg, const Workspace& ws,
                const std::filesystem::path& manifest_path) {
  std::filesystem::create_directories(ws.features());
  const DatasetManifest src = load_manifest(manifest_path);
  std::vector<std::vector<Keypoint>> all(src.images.size());
  parallel_for(src.images.size(), cfg.threads, [&](std::size_t i) {
    const ImageEntry& e = src.images[i];
    std::vector<Keypoint> kps =
        load_keypoints(e.features, e.bbox, src.descriptor_dim);
    if (kps.empty()) {
      fail("image '", e.id, "' has no keypoints after bbox filtering");
    }
    all[i] = std::move(kps);
  });

  json images = json::array();
  for (std::size_t i = 0; i < src.images.size(); ++i) {
    const ImageEntry& e = src.images[i];
    const std::string fname = e.id + ".jsonl";
    write_keypoints(ws.features() / fname, all[i]);
    images.push_back(json{{"id", e.id},
                          {"category", e.category},
                          {"role", e.role},
                          {"features", fname}});
  }
  write_text_file(
      ws.features() / "manifest.json",
      json{{"descriptor_dim", src.descriptor_dim}, {"images", images}}
              .dump(2) +
          "\n");
  write_meta(ws, load_manifest(ws.features() / "manifest.json"));
}

void run_graphs(const PipelineConfig& cfg, const Workspace& ws) {
  const Staged s = stage(cfg, ws);
  std::filesystem::create_directories(ws.graphs());
  GraphBuildParams params;
  params.n_seeds = cfg.n_seeds;
  params.layers = sorted_layers(cfg);

  std::vector<BuildLog> logs(s.manifest.images.size());
  parallel_for(s.manifest.images.size(), cfg.threads, [&](std::size_t i) {
    const ImageEntry& e = s.manifest.images[i];
    ImageFeatures feats;
    feats.image_id = e.id;
    feats.keypoints =
        load_keypoints(e.features, e.bbox, s.manifest.descriptor_dim);
    GraphLayers gl = build_graph_layers(feats, params);
    write_graph_file(ws.graphs() / (e.id + ".json"), e.id, gl,
                     s.config_hash);
    logs[i] = std::move(gl.log);
  });

  std::map<std::string, BuildLog> by_id;
  for (std::size_t i = 0; i < s.manifest.images.size(); ++i) {
    by_id[s.manifest.images[i].id] = logs[i];
  }
  write_build_log(ws.graphs() / "build_log.json", by_id, s.config_hash);
}

void run_dict(const PipelineConfig& cfg, const Workspace& ws) {
  const Staged s = stage(cfg, ws);
  std::filesystem::create_directories(ws.dicts());

  std::map<std::string, std::map<int, std::vector<GraphFeature>>> graphs;
  std::map<std::string, std::vector<std::vector<double>>> descs;
  for (const ImageEntry& e : s.manifest.images) {
    if (e.role != "train") continue;
    graphs[e.id] = load_graphs(ws, e.id, s.config_hash);
    if (uses_kmeans_block(cfg)) {
      descs[e.id] = descriptors_of(
          load_keypoints(e.features, e.bbox, s.manifest.descriptor_dim));
    }
  }

  const DictSet ds =
      build_dicts(cfg, s.manifest, graphs, descs, s.config_hash, 0);
  const std::vector<std::string> echo = config_echo(cfg);
  for (const auto& [layer, dict] : ds.by_layer) {
    write_dictionary_file(
        ws.dicts() / ("layer" + std::to_string(layer) + ".json"), dict,
        echo);
  }
  if (!ds.centroids.empty()) {
    write_centroid_file(ws.dicts() / "kmeans.json", ds.centroids,
                        s.config_hash, echo);
  }
}

namespace {

DictSet read_dicts(const PipelineConfig& cfg, const Workspace& ws,
                   const std::string& hash) {
  DictSet ds;
  for (int layer : sorted_layers(cfg)) {
    if (layer == 0 && !uses_layer0_dict(cfg)) continue;
    const auto path =
        ws.dicts() / ("layer" + std::to_string(layer) + ".json");
    if (!std::filesystem::exists(path)) {
      fail("no dictionary for layer ", layer, "; run dict first");
    }
    Dictionary dict = read_dictionary_file(path, hash);
    if (dict.layer != layer) {
      fail("'", path.string(), "' holds a layer-", dict.layer,
           " dictionary");
    }
    ds.by_layer[layer] = std::move(dict);
  }
  if (uses_kmeans_block(cfg)) {
    const auto path = ws.dicts() / "kmeans.json";
    if (!std::filesystem::exists(path)) {
      fail("no k-means centroid file; run dict first");
    }
    ds.centroids = read_centroid_file(path, hash);
  }
  return ds;
}

GraphsLoader disk_graphs_loader(const Workspace& ws,
                                const std::string& hash) {
  return [&ws, hash](const ImageEntry& e) {
    return load_graphs(ws, e.id, hash);
  };
}

DescsLoader disk_descs_loader(const DatasetManifest& manifest) {
  const int dim = manifest.descriptor_dim;
  return [dim](const ImageEntry& e) {
    return descriptors_of(load_keypoints(e.features, e.bbox, dim));
  };
}

}  // namespace

void run_encode(const PipelineConfig& cfg, const Workspace& ws) {
  const Staged s = stage(cfg, ws);
  std::filesystem::create_directories(ws.sigs());
  const DictSet ds = read_dicts(cfg, ws, s.config_hash);
  const std::vector<Signature> sigs =
      encode_all(cfg, s.manifest, disk_graphs_loader(ws, s.config_hash),
                 disk_descs_loader(s.manifest), ds);
  for (std::size_t i = 0; i < sigs.size(); ++i) {
    write_signature_file(ws.sigs() / (sigs[i].image_id + ".json"), sigs[i],
                         s.config_hash);
  }
}

namespace {

std::vector<Signature> read_signatures(const Workspace& ws,
                                       const DatasetManifest& manifest,
                                       const std::string& role,
                                       const std::string& hash) {
  std::vector<Signature> out;
  for (const ImageEntry& e : manifest.images) {
    if (e.role != role) continue;
    const auto path = ws.sigs() / (e.id + ".json");
    if (!std::filesystem::exists(path)) {
      fail("no signature for image '", e.id, "'; run encode first");
    }
    out.push_back(read_signature_file(path, hash));
  }
  return out;
}

}  // namespace

void run_eval(const PipelineConfig& cfg, const Workspace& ws) {
  const Staged s = stage(cfg, ws);
  std::filesystem::create_directories(ws.reports());
  const std::vector<Signature> test_sigs =
      read_signatures(ws, s.manifest, "test", s.config_hash);
  const std::vector<Signature> train_sigs =
      read_signatures(ws, s.manifest, "train", s.config_hash);
  const std::map<std::string, EvalReport> by_method =
      evaluate_methods(cfg, s.manifest, test_sigs, train_sigs);

  write_report_file(ws.reports() / "eval.json", by_method, s.config_hash,
                    config_echo(cfg));
  std::string csv = kCsvHeader;
  append_point_rows(csv, cfg, test_sigs[0], by_method, 0);
  write_text_file(ws.reports() / "sweep.csv", csv);
}

void run_query(const PipelineConfig& cfg, const Workspace& ws,
               const std::string& image_id, int topk, std::ostream& out) {
  if (topk < 1) {
    fail("topk must be positive, got ", topk);
  }
  const Staged s = stage(cfg, ws);
  bool known = false;
  for (const ImageEntry& e : s.manifest.images) {
    if (e.id == image_id) known = true;
  }
  if (!known) {
    fail("image '", image_id, "' is not in the manifest");
  }
  const auto qpath = ws.sigs() / (image_id + ".json");
  if (!std::filesystem::exists(qpath)) {
    fail("no signature for image '", image_id, "'; run encode first");
  }
  const Signature query = read_signature_file(qpath, s.config_hash);

  std::vector<Signature> database =
      read_signatures(ws, s.manifest, "train", s.config_hash);
  database.erase(std::remove_if(database.begin(), database.end(),
                                [&](const Signature& sig) {
                                  return sig.image_id == image_id;
                                }),
                 database.end());
  if (database.empty()) {
    fail("no train images to rank against");
  }

  const RankedList ranked = rank_database(query, database);
  const std::size_t n =
      std::min<std::size_t>(topk, ranked.entries.size());
  for (std::size_t i = 0; i < n; ++i) {
    out << (i + 1) << " " << ranked.entries[i].first << " "
        << format_double(ranked.entries[i].second) << "\n";
  }
}

void run_sweep(const PipelineConfig& cfg, const Workspace& ws) {
  const Staged s = stage(cfg, ws);
  std::filesystem::create_directories(ws.reports());

  std::map<std::string, std::map<int, std::vector<GraphFeature>>>
      train_graphs;
  std::map<std::string, std::vector<std::vector<double>>> train_descs;
  for (const ImageEntry& e : s.manifest.images) {
    if (e.role != "train") continue;
    train_graphs[e.id] = load_graphs(ws, e.id, s.config_hash);
    if (uses_kmeans_block(cfg)) {
      train_descs[e.id] = descriptors_of(
          load_keypoints(e.features, e.bbox, s.manifest.descriptor_dim));
    }
  }

  std::vector<int> sizes = cfg.sweep_sizes;
  std::sort(sizes.begin(), sizes.end());
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());

  std::string csv = kCsvHeader;
  for (int size : sizes) {
    const DictSet ds = build_dicts(cfg, s.manifest, train_graphs,
                                   train_descs, s.config_hash, size);
    const std::vector<Signature> sigs =
        encode_all(cfg, s.manifest, disk_graphs_loader(ws, s.config_hash),
                   disk_descs_loader(s.manifest), ds);
    std::vector<Signature> test_sigs;
    std::vector<Signature> train_sigs;
    for (std::size_t i = 0; i < sigs.size(); ++i) {
      if (s.manifest.images[i].role == "test") {
        test_sigs.push_back(sigs[i]);
      } else {
        train_sigs.push_back(sigs[i]);
      }
    }
    const std::map<std::string, EvalReport> by_method =
        evaluate_methods(cfg, s.manifest, test_sigs, train_sigs);
    append_point_rows(csv, cfg, sigs[0], by_method, size);
  }
  write_text_file(ws.reports() / "sweep.csv", csv);

  const json meta{{"config_hash", s.config_hash},
                  {"config_echo", config_echo(cfg)},
                  {"sizes", sizes}};
  write_text_file(ws.reports() / "sweep_meta.json", meta.dump(2) + "\n");
}

}  // namespace lgw
