#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "lgw/ingest.hpp"
#include "lgw/io.hpp"
#include "lgw/kernels.hpp"
#include "lgw/pipeline.hpp"
#include "lgw/rng.hpp"
#include "test_util.hpp"

using namespace lgw;
using json = nlohmann::json;
using lgwtest::TempDir;

namespace {

// Small fixture: fast enough for unit tests, still runs every stage with
// all four layers populated.
PipelineConfig fixture_config() {
  PipelineConfig cfg;
  cfg.n_seeds = 20;
  cfg.first_pass_k = 30;
  cfg.dict_size = 20;
  cfg.synth.n_categories = 2;
  cfg.synth.images_per_category = 6;
  cfg.synth.train_per_category = 4;
  cfg.synth.keypoints_per_image = 20;
  cfg.synth.descriptor_dim = 16;
  return cfg;
}

void run_all(const PipelineConfig& cfg, const Workspace& ws) {
  run_synth(cfg, ws);
  run_graphs(cfg, ws);
  run_dict(cfg, ws);
  run_encode(cfg, ws);
  run_eval(cfg, ws);
}

// Monte Carlo chance level: expected AP of a uniformly random ranking with
// n_rel relevant among n_db database images.
double chance_map(int n_db, int n_rel, int trials, std::uint64_t seed) {
  Rng rng(seed);
  double total = 0.0;
  for (int t = 0; t < trials; ++t) {
    std::vector<std::size_t> order = rng.sample_distinct(n_db, n_db);
    double sum = 0.0;
    int hits = 0;
    for (std::size_t r = 0; r < order.size(); ++r) {
      if (static_cast<int>(order[r]) < n_rel)
        sum += double(++hits) / double(r + 1);
    }
    total += sum / double(n_rel);
  }
  return total / double(trials);
}

}  // namespace

TEST_CASE("the five-stage pipeline writes every artifact") {
  TempDir tmp("pipe_full");
  Workspace ws{tmp.path() / "workspace"};
  PipelineConfig cfg = fixture_config();
  run_all(cfg, ws);

  CHECK(std::filesystem::exists(ws.features() / "manifest.json"));
  CHECK(std::filesystem::exists(ws.features() / "meta.json"));
  CHECK(std::filesystem::exists(ws.graphs() / "build_log.json"));
  for (int layer : {0, 3, 6, 9})
    CHECK(std::filesystem::exists(
        ws.dicts() / ("layer" + std::to_string(layer) + ".json")));
  CHECK_FALSE(std::filesystem::exists(ws.dicts() / "kmeans.json"));
  CHECK(std::filesystem::exists(ws.reports() / "eval.json"));
  CHECK(std::filesystem::exists(ws.reports() / "sweep.csv"));

  json manifest = json::parse(
      read_text_file(ws.features() / "manifest.json"));
  for (const json& e : manifest["images"]) {
    std::string id = e["id"].get<std::string>();
    CHECK(std::filesystem::exists(ws.features() / (id + ".jsonl")));
    CHECK(std::filesystem::exists(ws.graphs() / (id + ".json")));
    CHECK(std::filesystem::exists(ws.sigs() / (id + ".json")));
  }

  json report = json::parse(read_text_file(ws.reports() / "eval.json"));
  REQUIRE(report.contains("methods"));
  for (const char* method : {"single_0", "single_3", "single_6",
                             "single_9", "fused"}) {
    REQUIRE(report["methods"].contains(method));
    double map = report["methods"][method]["dataset_map"].get<double>();
    CHECK(map >= 0.0);
    CHECK(map <= 1.0);
  }
  CHECK(report.contains("config_echo"));

  std::string csv = read_text_file(ws.reports() / "sweep.csv");
  CHECK(csv.rfind("method,layer_set,dict_size,category,map,dataset_map\n",
                  0) == 0);
  CHECK(csv.find("fused,") != std::string::npos);
  CHECK(csv.find("single,") != std::string::npos);
}

TEST_CASE("well-separated categories retrieve nearly perfectly") {
  TempDir tmp("pipe_sep");
  Workspace ws{tmp.path() / "workspace"};
  PipelineConfig cfg = fixture_config();
  cfg.synth.cluster_separation = 2.0;
  run_all(cfg, ws);
  json report = json::parse(read_text_file(ws.reports() / "eval.json"));
  CHECK(report["methods"]["fused"]["dataset_map"].get<double>() > 0.9);
}

TEST_CASE("zero separation lands near the chance level") {
  TempDir tmp("pipe_chance");
  Workspace ws{tmp.path() / "workspace"};
  PipelineConfig cfg = fixture_config();
  cfg.synth.cluster_separation = 0.0;
  run_all(cfg, ws);
  json report = json::parse(read_text_file(ws.reports() / "eval.json"));
  double map = report["methods"]["fused"]["dataset_map"].get<double>();

  int n_db = cfg.synth.n_categories * cfg.synth.train_per_category;
  double chance = chance_map(n_db, cfg.synth.train_per_category, 20000, 99);
  CHECK(std::fabs(map - chance) < 0.15);
}

TEST_CASE("kmeans baseline fusion swaps the layer-zero block") {
  TempDir tmp("pipe_kmeans");
  Workspace ws{tmp.path() / "workspace"};
  PipelineConfig cfg = fixture_config();
  cfg.fusion = "kmeans-baseline";
  cfg.layers = {0, 3};
  run_all(cfg, ws);
  CHECK(std::filesystem::exists(ws.dicts() / "kmeans.json"));
  CHECK_FALSE(std::filesystem::exists(ws.dicts() / "layer0.json"));

  json report = json::parse(read_text_file(ws.reports() / "eval.json"));
  CHECK(report["methods"].contains("single_kmeans"));
  CHECK(report["methods"].contains("single_3"));
  CHECK(report["methods"].contains("fused"));
  CHECK_FALSE(report["methods"].contains("single_0"));

  json manifest = json::parse(
      read_text_file(ws.features() / "manifest.json"));
  std::string id = manifest["images"][0]["id"].get<std::string>();
  json sig = json::parse(read_text_file(ws.sigs() / (id + ".json")));
  CHECK(sig["blocks"][0]["tag"].get<std::string>() == "kmeans");
  CHECK(sig["blocks"][1]["tag"].get<std::string>() == "3");
}

TEST_CASE("stages refuse artifacts from another configuration") {
  TempDir tmp("pipe_stale");
  Workspace ws{tmp.path() / "workspace"};
  PipelineConfig cfg = fixture_config();
  run_all(cfg, ws);

  PipelineConfig changed = cfg;
  changed.dict_size = 19;
  CHECK_THROWS_WITH_AS(run_encode(changed, ws),
                       doctest::Contains("re-run"), Error);
  CHECK_THROWS_WITH_AS(run_eval(changed, ws), doctest::Contains("re-run"),
                       Error);
}

TEST_CASE("stages demand their upstream artifacts") {
  TempDir tmp("pipe_missing");
  Workspace ws{tmp.path() / "workspace"};
  PipelineConfig cfg = fixture_config();
  CHECK_THROWS_WITH_AS(run_graphs(cfg, ws),
                       doctest::Contains("synth or ingest"), Error);
  run_synth(cfg, ws);
  CHECK_THROWS_WITH_AS(run_dict(cfg, ws), doctest::Contains("graphs"),
                       Error);
  run_graphs(cfg, ws);
  CHECK_THROWS_WITH_AS(run_encode(cfg, ws), doctest::Contains("dict"),
                       Error);
  run_dict(cfg, ws);
  CHECK_THROWS_WITH_AS(run_eval(cfg, ws), doctest::Contains("encode"),
                       Error);
}

TEST_CASE("query prints ranked lines for the requested image") {
  TempDir tmp("pipe_query");
  Workspace ws{tmp.path() / "workspace"};
  PipelineConfig cfg = fixture_config();
  run_all(cfg, ws);

  json manifest = json::parse(
      read_text_file(ws.features() / "manifest.json"));
  std::string test_id;
  int n_train = 0;
  for (const json& e : manifest["images"]) {
    if (e["role"] == "test" && test_id.empty())
      test_id = e["id"].get<std::string>();
    if (e["role"] == "train") ++n_train;
  }
  REQUIRE_FALSE(test_id.empty());

  std::ostringstream out;
  run_query(cfg, ws, test_id, 5, out);
  std::istringstream lines(out.str());
  std::string line;
  int rank = 0;
  double prev = -1.0;
  while (std::getline(lines, line)) {
    ++rank;
    std::istringstream row(line);
    int got_rank = -1;
    std::string id;
    double dist = 0.0;
    bool parsed = static_cast<bool>(row >> got_rank >> id >> dist);
    REQUIRE(parsed);
    CHECK(got_rank == rank);
    CHECK(dist >= prev);
    prev = dist;
  }
  CHECK(rank == 5);

  std::ostringstream all;
  run_query(cfg, ws, test_id, 1000, all);
  int total = 0;
  std::istringstream all_lines(all.str());
  while (std::getline(all_lines, line)) ++total;
  CHECK(total == n_train);

  CHECK_THROWS_AS(run_query(cfg, ws, "ghost", 5, out), Error);
  CHECK_THROWS_AS(run_query(cfg, ws, test_id, 0, out), Error);
}

TEST_CASE("sweep re-evaluates every dictionary size") {
  TempDir tmp("pipe_sweep");
  Workspace ws{tmp.path() / "workspace"};
  PipelineConfig cfg = fixture_config();
  cfg.layers = {0, 3};
  cfg.sweep_sizes = {5, 10};
  run_synth(cfg, ws);
  run_graphs(cfg, ws);
  run_sweep(cfg, ws);

  CHECK(std::filesystem::exists(ws.reports() / "sweep_meta.json"));
  std::string csv = read_text_file(ws.reports() / "sweep.csv");
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "method,layer_set,dict_size,category,map,dataset_map");
  int rows = 0, size5 = 0, size10 = 0;
  while (std::getline(lines, line)) {
    ++rows;
    if (line.find(",5,") != std::string::npos) ++size5;
    if (line.find(",10,") != std::string::npos) ++size10;
  }
  // 2 sizes x (2 single blocks + fused) x 2 categories
  CHECK(rows == 12);
  CHECK(size5 == 6);
  CHECK(size10 == 6);
}

TEST_CASE("ingest normalizes an external dataset into the workspace") {
  TempDir src("pipe_ingest_src");
  TempDir tmp("pipe_ingest");

  SyntheticSpec spec;
  spec.n_categories = 2;
  spec.images_per_category = 3;
  spec.train_per_category = 2;
  spec.keypoints_per_image = 12;
  spec.descriptor_dim = 8;
  generate_synthetic_dataset(spec, 21, src.path());

  Workspace ws{tmp.path() / "workspace"};
  PipelineConfig cfg = fixture_config();
  cfg.synth = spec;
  run_ingest(cfg, ws, src.path() / "manifest.json");

  CHECK(std::filesystem::exists(ws.features() / "manifest.json"));
  CHECK(std::filesystem::exists(ws.features() / "meta.json"));
  DatasetManifest m = load_manifest(ws.features() / "manifest.json");
  CHECK(m.images.size() == 6);

  cfg.n_seeds = 10;
  cfg.first_pass_k = 10;
  cfg.dict_size = 8;
  cfg.layers = {0, 3};
  run_graphs(cfg, ws);
  run_dict(cfg, ws);
  run_encode(cfg, ws);
  run_eval(cfg, ws);
  CHECK(std::filesystem::exists(ws.reports() / "eval.json"));
}

TEST_CASE("scalar and vector backends agree end to end") {
  namespace k = lgw::kernels;
  if (!k::supported(k::Backend::avx2) &&
      !k::supported(k::Backend::neon)) return;

  PipelineConfig cfg = fixture_config();
  cfg.synth.images_per_category = 4;
  cfg.synth.train_per_category = 3;
  cfg.layers = {0, 3};
  cfg.n_seeds = 8;
  cfg.first_pass_k = 6;
  cfg.dict_size = 5;

  k::Backend before = k::active_backend();
  double vec_map, sc_map;
  {
    TempDir tmp("pipe_vec");
    Workspace ws{tmp.path() / "workspace"};
    run_all(cfg, ws);
    CHECK(k::active_backend() != k::Backend::scalar);
    json r = json::parse(read_text_file(ws.reports() / "eval.json"));
    vec_map = r["methods"]["fused"]["dataset_map"].get<double>();
  }
  {
    TempDir tmp("pipe_scalar");
    Workspace ws{tmp.path() / "workspace"};
    PipelineConfig sc = cfg;
    sc.kernel_backend = "scalar";
    run_all(sc, ws);
    CHECK(k::active_backend() == k::Backend::scalar);
    json r = json::parse(read_text_file(ws.reports() / "eval.json"));
    sc_map = r["methods"]["fused"]["dataset_map"].get<double>();
  }
  k::set_backend(before);
  CHECK(std::fabs(vec_map - sc_map) <= 1e-6);
}
