#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lgw/config.hpp"
#include "lgw/pipeline.hpp"

int main(int argc, char** argv) {
  CLI::App app{"multi-layer local graph words for object-based image retrieval"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string workspace = "workspace";
  std::vector<std::string> overrides;
  app.add_option("--config", config_path,
                 "configuration file, one `key = value` per line");
  app.add_option("--workspace", workspace, "workspace directory")
      ->capture_default_str();
  app.add_option("--set", overrides,
                 "override one config key (key=value, repeatable)");

  auto* synth =
      app.add_subcommand("synth", "generate the synthetic dataset");

  std::string manifest;
  auto* ingest = app.add_subcommand(
      "ingest", "normalize an external dataset into the workspace");
  ingest->add_option("--manifest", manifest, "dataset manifest JSON")
      ->required();

  auto* graphs =
      app.add_subcommand("graphs", "build graph layers for every image");
  auto* dict =
      app.add_subcommand("dict", "build per-layer dictionaries");
  auto* encode =
      app.add_subcommand("encode", "encode every image's fused signature");
  auto* eval =
      app.add_subcommand("eval", "evaluate retrieval MAP per method");
  auto* sweep = app.add_subcommand(
      "sweep", "re-evaluate across the configured dictionary sizes");

  std::string query_image;
  int topk = 10;
  auto* query = app.add_subcommand(
      "query", "rank the train images for one query image");
  query->add_option("--image", query_image, "query image id")->required();
  query->add_option("--topk", topk, "result lines to print")
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    lgw::PipelineConfig cfg;
    if (!config_path.empty()) {
      cfg = lgw::load_config_file(config_path);
    }
    for (const std::string& o : overrides) {
      lgw::apply_config_override(cfg, o);
    }
    lgw::validate_config(cfg);
    const lgw::Workspace ws{workspace};

    if (synth->parsed()) {
      lgw::run_synth(cfg, ws);
    } else if (ingest->parsed()) {
      lgw::run_ingest(cfg, ws, manifest);
    } else if (graphs->parsed()) {
      lgw::run_graphs(cfg, ws);
    } else if (dict->parsed()) {
      lgw::run_dict(cfg, ws);
    } else if (encode->parsed()) {
      lgw::run_encode(cfg, ws);
    } else if (eval->parsed()) {
      lgw::run_eval(cfg, ws);
    } else if (sweep->parsed()) {
      lgw::run_sweep(cfg, ws);
    } else if (query->parsed()) {
      lgw::run_query(cfg, ws, query_image, topk, std::cout);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
