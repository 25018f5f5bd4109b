#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "lgw/codebook.hpp"
#include "lgw/dataset.hpp"
#include "lgw/evaluate.hpp"
#include "lgw/graph_build.hpp"
#include "lgw/signature.hpp"

namespace lgw {

/// Per-image graph artifact: `image_id`, `config_hash`, `layers` keyed by
/// layer number with `{seed, nodes, edges}` graphs.
void write_graph_file(const std::filesystem::path& path,
                      const std::string& image_id, const GraphLayers& graphs,
                      const std::string& config_hash);

/// Reads a graph artifact, refusing on a config-hash mismatch.
std::map<int, std::vector<GraphFeature>> read_graph_file(
    const std::filesystem::path& path, const std::string& image_id,
    const std::string& expect_hash);

/// Aggregated per-image skip counts, one sibling file per graphs directory.
void write_build_log(const std::filesystem::path& path,
                     const std::map<std::string, BuildLog>& logs,
                     const std::string& config_hash);

/// Dictionary artifact: `layer`, `params_hash`, `words`, `metadata`.
void write_dictionary_file(const std::filesystem::path& path,
                           const Dictionary& dict,
                           const std::vector<std::string>& config_echo);

Dictionary read_dictionary_file(const std::filesystem::path& path,
                                const std::string& expect_hash);

/// K-means centroid artifact for the baseline signature block.
void write_centroid_file(const std::filesystem::path& path,
                         const std::vector<std::vector<double>>& centroids,
                         const std::string& config_hash,
                         const std::vector<std::string>& config_echo);

std::vector<std::vector<double>> read_centroid_file(
    const std::filesystem::path& path, const std::string& expect_hash);

/// Signature artifact: `image_id`, `config_hash`, `blocks`.
void write_signature_file(const std::filesystem::path& path,
                          const Signature& sig,
                          const std::string& config_hash);

Signature read_signature_file(const std::filesystem::path& path,
                              const std::string& expect_hash);

/// Evaluation report: one EvalReport per method plus the config echo.
void write_report_file(const std::filesystem::path& path,
                       const std::map<std::string, EvalReport>& by_method,
                       const std::string& config_hash,
                       const std::vector<std::string>& config_echo);

/// Identity hash over the manifest and every feature file it references, in
/// manifest order.
std::string dataset_hash_hex(const std::filesystem::path& manifest_path,
                             const DatasetManifest& manifest);

void write_text_file(const std::filesystem::path& path,
                     const std::string& text);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace lgw
