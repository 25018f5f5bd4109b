#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "lgw/config.hpp"
#include "lgw/ingest.hpp"
#include "lgw/io.hpp"
#include "lgw/kernels.hpp"
#include "lgw/synthetic.hpp"
#include "test_util.hpp"

using namespace lgw;
using json = nlohmann::json;
using lgwtest::TempDir;

namespace {

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

std::string slurp(const std::filesystem::path& p) {
  return read_text_file(p);
}

std::string kp_line(double x, double y, double response,
                    std::vector<double> desc) {
  json j;
  j["x"] = x;
  j["y"] = y;
  j["response"] = response;
  j["desc"] = desc;
  return j.dump() + "\n";
}

json entry(const std::string& id, const std::string& category,
           const std::string& role, const std::string& features) {
  return json{{"id", id},
              {"category", category},
              {"role", role},
              {"features", features}};
}

void write_manifest(const std::filesystem::path& dir, const json& images,
                    int dim = 4) {
  json m;
  m["descriptor_dim"] = dim;
  m["images"] = images;
  write_file(dir / "manifest.json", m.dump(2));
}

void write_default_features(const std::filesystem::path& dir,
                            const std::string& name) {
  write_file(dir / name, kp_line(0, 0, 1.0, {1, 0, 0, 0}) +
                             kp_line(1, 1, 0.5, {0, 1, 0, 0}));
}

}  // namespace

TEST_CASE("manifest with two categories of two train images loads") {
  TempDir tmp("manifest_ok");
  for (const char* name : {"a0.jsonl", "a1.jsonl", "b0.jsonl", "b1.jsonl"})
    write_default_features(tmp.path(), name);
  write_manifest(tmp.path(),
                 json::array({entry("a0", "catA", "train", "a0.jsonl"),
                              entry("a1", "catA", "train", "a1.jsonl"),
                              entry("b0", "catB", "train", "b0.jsonl"),
                              entry("b1", "catB", "train", "b1.jsonl")}));
  DatasetManifest m = load_manifest(tmp.path() / "manifest.json");
  CHECK(m.descriptor_dim == 4);
  REQUIRE(m.images.size() == 4);
  CHECK(m.images[0].id == "a0");
  CHECK(m.images[3].category == "catB");
  for (const ImageEntry& e : m.images)
    CHECK(std::filesystem::exists(e.features));
}

TEST_CASE("manifest validation failures") {
  TempDir tmp("manifest_bad");
  write_default_features(tmp.path(), "img.jsonl");

  SUBCASE("duplicate image id") {
    write_manifest(tmp.path(),
                   json::array({entry("dup", "c", "train", "img.jsonl"),
                                entry("dup", "c", "train", "img.jsonl")}));
    CHECK_THROWS_WITH_AS(load_manifest(tmp.path() / "manifest.json"),
                         doctest::Contains("dup"), Error);
  }
  SUBCASE("unknown role") {
    write_manifest(tmp.path(),
                   json::array({entry("a", "c", "train", "img.jsonl"),
                                entry("b", "c", "validate", "img.jsonl")}));
    CHECK_THROWS_WITH_AS(load_manifest(tmp.path() / "manifest.json"),
                         doctest::Contains("role"), Error);
  }
  SUBCASE("missing feature file") {
    write_manifest(tmp.path(),
                   json::array({entry("a", "c", "train", "gone.jsonl")}));
    CHECK_THROWS_AS(load_manifest(tmp.path() / "manifest.json"), Error);
  }
  SUBCASE("category without a train image") {
    write_manifest(tmp.path(),
                   json::array({entry("a", "c", "train", "img.jsonl"),
                                entry("b", "lonely", "test", "img.jsonl")}));
    CHECK_THROWS_WITH_AS(load_manifest(tmp.path() / "manifest.json"),
                         doctest::Contains("lonely"), Error);
  }
}

TEST_CASE("descriptors are rescaled to unit norm") {
  TempDir tmp("normalize");
  write_file(tmp.path() / "kp.jsonl", kp_line(0, 0, 1.0, {3, 4, 0, 0}));
  std::vector<Keypoint> kps =
      load_keypoints(tmp.path() / "kp.jsonl", std::nullopt, 4);
  REQUIRE(kps.size() == 1);
  CHECK(kps[0].desc[0] == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(kps[0].desc[1] == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(kps[0].desc[2] == 0.0);
  CHECK(kps[0].desc[3] == 0.0);
  CHECK(kps[0].response == 1.0);
}

TEST_CASE("keypoint record validation names the record") {
  TempDir tmp("kp_bad");

  SUBCASE("descriptor length mismatch") {
    write_file(tmp.path() / "kp.jsonl",
               kp_line(0, 0, 1.0, {1, 0, 0, 0}) +
                   kp_line(1, 1, 1.0, {1, 0, 0}));
    CHECK_THROWS_WITH_AS(
        load_keypoints(tmp.path() / "kp.jsonl", std::nullopt, 4),
        doctest::Contains("record 1"), Error);
  }
  SUBCASE("negative response") {
    write_file(tmp.path() / "kp.jsonl", kp_line(0, 0, -0.5, {1, 0, 0, 0}));
    CHECK_THROWS_WITH_AS(
        load_keypoints(tmp.path() / "kp.jsonl", std::nullopt, 4),
        doctest::Contains("negative response"), Error);
  }
  SUBCASE("zero response is legal") {
    write_file(tmp.path() / "kp.jsonl", kp_line(0, 0, 0.0, {1, 0, 0, 0}));
    CHECK(load_keypoints(tmp.path() / "kp.jsonl", std::nullopt, 4).size() ==
          1);
  }
  SUBCASE("zero-norm descriptor") {
    write_file(tmp.path() / "kp.jsonl", kp_line(0, 0, 1.0, {0, 0, 0, 0}));
    CHECK_THROWS_WITH_AS(
        load_keypoints(tmp.path() / "kp.jsonl", std::nullopt, 4),
        doctest::Contains("zero-norm"), Error);
  }
}

TEST_CASE("bbox keeps inside keypoints in file order, bounds inclusive") {
  TempDir tmp("bbox");
  std::string lines;
  for (int i = 0; i < 10; ++i)
    lines += kp_line(double(i), double(i), 1.0, {1, 0, 0, 0});
  write_file(tmp.path() / "kp.jsonl", lines);
  Bbox box = {2.0, 2.0, 7.0, 7.0};
  std::vector<Keypoint> kps =
      load_keypoints(tmp.path() / "kp.jsonl", box, 4);
  REQUIRE(kps.size() == 6);
  for (int i = 0; i < 6; ++i) CHECK(kps[i].x == double(i + 2));
}

TEST_CASE("bbox filtering commutes with normalization") {
  TempDir tmp("bbox_commute");
  std::string lines;
  for (int i = 0; i < 8; ++i)
    lines += kp_line(double(i), 0.0, 1.0,
                     {double(i + 1), 2.0, -1.0, 0.5});
  write_file(tmp.path() / "kp.jsonl", lines);
  Bbox box = {2.0, -1.0, 5.0, 1.0};

  std::vector<Keypoint> filtered =
      load_keypoints(tmp.path() / "kp.jsonl", box, 4);
  std::vector<Keypoint> all =
      load_keypoints(tmp.path() / "kp.jsonl", std::nullopt, 4);
  std::vector<Keypoint> manual;
  for (const Keypoint& k : all)
    if (k.x >= box[0] && k.x <= box[2] && k.y >= box[1] && k.y <= box[3])
      manual.push_back(k);

  REQUIRE(filtered.size() == manual.size());
  for (std::size_t i = 0; i < manual.size(); ++i) {
    CHECK(filtered[i].x == manual[i].x);
    CHECK(filtered[i].desc == manual[i].desc);
  }
}

TEST_CASE("load, write, load is the identity") {
  TempDir tmp("roundtrip");
  write_file(tmp.path() / "kp.jsonl",
             kp_line(0.125, -3.5, 0.75, {3, 4, 0, 0}) +
                 kp_line(1e-7, 2.5e8, 0.0, {0.1, 0.2, 0.3, 0.4}));
  std::vector<Keypoint> first =
      load_keypoints(tmp.path() / "kp.jsonl", std::nullopt, 4);
  write_keypoints(tmp.path() / "out.jsonl", first);
  std::vector<Keypoint> second =
      load_keypoints(tmp.path() / "out.jsonl", std::nullopt, 4);
  REQUIRE(second.size() == first.size());
  for (std::size_t i = 0; i < first.size(); ++i) {
    CHECK(second[i].x == first[i].x);
    CHECK(second[i].y == first[i].y);
    CHECK(second[i].response == first[i].response);
    CHECK(second[i].desc == first[i].desc);
  }
}

TEST_CASE("synthetic generation is byte-deterministic") {
  TempDir a("synth_a");
  TempDir b("synth_b");
  SyntheticSpec spec;
  spec.n_categories = 2;
  spec.images_per_category = 3;
  spec.train_per_category = 2;
  spec.keypoints_per_image = 12;
  spec.descriptor_dim = 8;
  DatasetManifest ma = generate_synthetic_dataset(spec, 7, a.path());
  DatasetManifest mb = generate_synthetic_dataset(spec, 7, b.path());
  REQUIRE(ma.images.size() == mb.images.size());
  CHECK(slurp(a.path() / "manifest.json") ==
        slurp(b.path() / "manifest.json"));
  for (std::size_t i = 0; i < ma.images.size(); ++i) {
    CHECK(slurp(ma.images[i].features) == slurp(mb.images[i].features));
  }

  DatasetManifest mc = generate_synthetic_dataset(spec, 8, a.path());
  bool any_differ = false;
  for (std::size_t i = 0; i < ma.images.size(); ++i)
    if (slurp(mc.images[i].features) != slurp(mb.images[i].features))
      any_differ = true;
  CHECK(any_differ);
}

TEST_CASE("synthetic spec validation") {
  TempDir tmp("synth_bad");
  SyntheticSpec spec;
  spec.keypoints_per_image = 5;
  CHECK_THROWS_WITH_AS(generate_synthetic_dataset(spec, 1, tmp.path()),
                       doctest::Contains("keypoints_per_image"), Error);
  spec.keypoints_per_image = 10;
  spec.train_per_category = 20;
  CHECK_THROWS_AS(generate_synthetic_dataset(spec, 1, tmp.path()), Error);
}

TEST_CASE("synthetic output passes its own ingest validation") {
  TempDir tmp("synth_valid");
  SyntheticSpec spec;
  spec.n_categories = 2;
  spec.images_per_category = 2;
  spec.train_per_category = 1;
  spec.keypoints_per_image = 10;
  spec.descriptor_dim = 6;
  generate_synthetic_dataset(spec, 3, tmp.path());
  DatasetManifest m = load_manifest(tmp.path() / "manifest.json");
  CHECK(m.images.size() == 4);
  for (const ImageEntry& e : m.images) {
    std::vector<Keypoint> kps = load_keypoints(e.features, e.bbox, 6);
    CHECK(kps.size() == 10);
    for (const Keypoint& k : kps) {
      double norm = 0.0;
      for (double v : k.desc) norm += v * v;
      CHECK(std::fabs(norm - 1.0) <= 1e-9);
    }
  }
}

TEST_CASE("config files parse with comments and overrides") {
  TempDir tmp("config");
  write_file(tmp.path() / "run.conf",
             "# retrieval run\n"
             "n_seeds = 25\n"
             "alpha = 0.001   # stronger context\n"
             "layers = 0,3\n"
             "dict_size = 40\n");
  PipelineConfig cfg =
      load_config_file((tmp.path() / "run.conf").string());
  CHECK(cfg.n_seeds == 25);
  CHECK(cfg.cdk.alpha == 0.001);
  CHECK(cfg.layers == std::vector<int>{0, 3});
  CHECK(cfg.dict_size == 40);
  CHECK(cfg.cdk.beta == 0.1);

  apply_config_override(cfg, "beta=0.25");
  CHECK(cfg.cdk.beta == 0.25);
  apply_config_override(cfg, "dict_size_3=17");
  CHECK(cfg.dict_size_for(3) == 17);
  CHECK(cfg.dict_size_for(0) == 40);

  CHECK_THROWS_AS(apply_config_override(cfg, "mystery=1"), Error);
  CHECK_THROWS_AS(apply_config_override(cfg, "n_seeds=abc"), Error);

  // Semantically bad values parse but fail validation.
  auto override_and_validate = [&](const std::string& assignment) {
    PipelineConfig probe = cfg;
    apply_config_override(probe, assignment);
    validate_config(probe);
  };
  CHECK_THROWS_AS(override_and_validate("layers=0,4"), Error);
  CHECK_THROWS_AS(override_and_validate("fusion=late"), Error);
  CHECK_NOTHROW(override_and_validate("layers=0,6"));
}

TEST_CASE("config echo marks choices and omits scheduling knobs") {
  PipelineConfig cfg;
  std::vector<std::string> echo = config_echo(cfg);
  bool saw_seeds = false, saw_alpha = false, saw_rng = false;
  for (const std::string& line : echo) {
    CHECK(line.find("threads") == std::string::npos);
    if (line.find("n_seeds") != std::string::npos) {
      saw_seeds = true;
      CHECK(line.find("# choice") == std::string::npos);
    }
    if (line.find("alpha") != std::string::npos) {
      saw_alpha = true;
      CHECK(line.find("# choice") == std::string::npos);
    }
    if (line.find("rng_seed") != std::string::npos) {
      saw_rng = true;
      CHECK(line.find("# choice") != std::string::npos);
    }
  }
  CHECK(saw_seeds);
  CHECK(saw_alpha);
  CHECK(saw_rng);
}

TEST_CASE("config hash tracks semantics, not scheduling") {
  PipelineConfig base;
  std::string h = config_hash_hex(base, "dataset");

  PipelineConfig same = base;
  same.threads = 8;
  same.sweep_sizes = {10};
  same.synth.n_categories = 9;
  CHECK(config_hash_hex(same, "dataset") == h);

  PipelineConfig alpha = base;
  alpha.cdk.alpha = 0.5;
  CHECK(config_hash_hex(alpha, "dataset") != h);

  PipelineConfig seeds = base;
  seeds.n_seeds = 50;
  CHECK(config_hash_hex(seeds, "dataset") != h);

  PipelineConfig sized = base;
  sized.dict_size_by_layer[3] = 123;
  CHECK(config_hash_hex(sized, "dataset") != h);

  CHECK(config_hash_hex(base, "other") != h);

  PipelineConfig scalar = base;
  scalar.kernel_backend = "scalar";
  PipelineConfig avx2 = base;
  avx2.kernel_backend = "avx2";
  if (kernels::supported(kernels::Backend::avx2)) {
    CHECK(config_hash_hex(scalar, "dataset") !=
          config_hash_hex(avx2, "dataset"));
  }
}

TEST_CASE("format_double round-trips") {
  for (double v : {0.0, 1.0, -1.5, 0.1, 1e-17, 3.141592653589793,
                   0.4024929}) {
    std::string s = format_double(v);
    CHECK(std::stod(s) == v);
  }
}

TEST_CASE("graph artifacts round-trip and refuse stale hashes") {
  TempDir tmp("io_graph");
  Rng rng(801);
  ImageFeatures img;
  img.image_id = "img0";
  for (int i = 0; i < 12; ++i) {
    Keypoint k;
    k.x = rng.uniform(0.0, 10.0);
    k.y = rng.uniform(0.0, 10.0);
    k.response = rng.uniform01();
    k.desc = lgwtest::unit_descriptor(rng, 6);
    img.keypoints.push_back(k);
  }
  GraphLayers built = build_graph_layers(img, {300, {0, 3, 6, 9}});
  write_graph_file(tmp.path() / "img0.json", "img0", built, "hash_a");

  auto loaded = read_graph_file(tmp.path() / "img0.json", "img0", "hash_a");
  for (int layer : {0, 3, 6, 9}) {
    REQUIRE(loaded.at(layer).size() == built.layers.at(layer).size());
    for (std::size_t i = 0; i < loaded.at(layer).size(); ++i) {
      const GraphFeature& a = built.layers.at(layer)[i];
      const GraphFeature& b = loaded.at(layer)[i];
      CHECK(b.layer == a.layer);
      CHECK(b.seed_index == a.seed_index);
      CHECK(b.nodes == a.nodes);
      CHECK(b.edges == a.edges);
      CHECK(b.image_id == "img0");
    }
  }

  CHECK_THROWS_WITH_AS(
      read_graph_file(tmp.path() / "img0.json", "img0", "hash_b"),
      doctest::Contains("re-run"), Error);
}

TEST_CASE("dictionary artifacts round-trip") {
  TempDir tmp("io_dict");
  Rng rng(803);
  Dictionary dict;
  dict.layer = 3;
  dict.params_hash = "hash_a";
  for (int i = 0; i < 4; ++i) {
    dict.words.push_back(
        lgwtest::random_graph(rng, 3, 4, 6, "src" + std::to_string(i)));
    dict.word_origins.emplace_back("cat" + std::to_string(i % 2), i);
  }
  dict.category_feature_counts = {{"cat0", 10}, {"cat1", 12}};
  dict.category_median_counts = {{"cat0", 2}, {"cat1", 2}};
  dict.undersized = true;

  write_dictionary_file(tmp.path() / "layer3.json", dict, {"a = 1"});
  Dictionary back = read_dictionary_file(tmp.path() / "layer3.json",
                                         "hash_a");
  CHECK(back.layer == 3);
  CHECK(back.params_hash == "hash_a");
  CHECK(back.undersized);
  CHECK(back.word_origins == dict.word_origins);
  CHECK(back.category_feature_counts == dict.category_feature_counts);
  CHECK(back.category_median_counts == dict.category_median_counts);
  REQUIRE(back.words.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(back.words[i].nodes == dict.words[i].nodes);
    CHECK(back.words[i].edges == dict.words[i].edges);
    CHECK(back.words[i].image_id == dict.words[i].image_id);
  }
  CHECK_THROWS_AS(
      read_dictionary_file(tmp.path() / "layer3.json", "hash_b"), Error);
}

TEST_CASE("signature and centroid artifacts round-trip") {
  TempDir tmp("io_sig");
  Signature sig;
  sig.image_id = "img";
  sig.blocks.push_back({"kmeans", {0.25, 0.75}});
  sig.blocks.push_back({"3", {0.0, 0.5, 0.5}});
  write_signature_file(tmp.path() / "img.json", sig, "h");
  Signature back = read_signature_file(tmp.path() / "img.json", "h");
  CHECK(back.image_id == "img");
  REQUIRE(back.blocks.size() == 2);
  CHECK(back.blocks[0].tag == "kmeans");
  CHECK(back.blocks[0].values == sig.blocks[0].values);
  CHECK(back.blocks[1].tag == "3");
  CHECK(back.blocks[1].values == sig.blocks[1].values);
  CHECK_THROWS_AS(read_signature_file(tmp.path() / "img.json", "x"), Error);

  std::vector<std::vector<double>> centroids = {{0.5, 0.5}, {1.0, 0.0}};
  write_centroid_file(tmp.path() / "kmeans.json", centroids, "h", {});
  CHECK(read_centroid_file(tmp.path() / "kmeans.json", "h") == centroids);
}

TEST_CASE("dataset hash changes with content") {
  TempDir tmp("dhash");
  SyntheticSpec spec;
  spec.n_categories = 2;
  spec.images_per_category = 2;
  spec.train_per_category = 1;
  spec.keypoints_per_image = 10;
  spec.descriptor_dim = 4;
  DatasetManifest m = generate_synthetic_dataset(spec, 11, tmp.path());
  std::string h1 = dataset_hash_hex(tmp.path() / "manifest.json", m);
  CHECK(dataset_hash_hex(tmp.path() / "manifest.json", m) == h1);

  std::string text = slurp(m.images[0].features);
  write_file(m.images[0].features, text + "\n");
  CHECK(dataset_hash_hex(tmp.path() / "manifest.json", m) != h1);
}
