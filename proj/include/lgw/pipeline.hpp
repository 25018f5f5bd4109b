#pragma once

#include <filesystem>
#include <ostream>
#include <string>

#include "lgw/config.hpp"

namespace lgw {

/// On-disk layout of one pipeline run. Every stage writes into its own
/// subdirectory and stamps artifacts with the config hash, so mixing stages
/// from different configurations is refused instead of silently blended.
struct Workspace {
  std::filesystem::path root;

  std::filesystem::path features() const { return root / "features"; }
  std::filesystem::path graphs() const { return root / "graphs"; }
  std::filesystem::path dicts() const { return root / "dicts"; }
  std::filesystem::path sigs() const { return root / "sigs"; }
  std::filesystem::path reports() const { return root / "reports"; }
};

/// Generates the synthetic dataset into features/.
void run_synth(const PipelineConfig& cfg, const Workspace& ws);

/// Normalizes an external dataset into features/: bbox filters applied,
/// descriptors rescaled to unit norm, manifest rewritten workspace-local.
void run_ingest(const PipelineConfig& cfg, const Workspace& ws,
                const std::filesystem::path& manifest_path);

/// Builds every configured graph layer for every image.
void run_graphs(const PipelineConfig& cfg, const Workspace& ws);

/// Builds one dictionary per configured layer (plus k-means centroids under
/// the baseline fusion) from the train images.
void run_dict(const PipelineConfig& cfg, const Workspace& ws);

/// Encodes every image into a fused signature.
void run_encode(const PipelineConfig& cfg, const Workspace& ws);

/// Evaluates MAP per method (each single block plus the fusion) and writes
/// the report and the one-point sweep CSV.
void run_eval(const PipelineConfig& cfg, const Workspace& ws);

/// Prints `rank image_id distance` lines for the top-k train images closest
/// to the given image's signature.
void run_query(const PipelineConfig& cfg, const Workspace& ws,
               const std::string& image_id, int topk, std::ostream& out);

/// Re-builds dictionaries, signatures, and evaluations in memory for every
/// configured sweep size and writes the multi-size CSV.
void run_sweep(const PipelineConfig& cfg, const Workspace& ws);

}  // namespace lgw
