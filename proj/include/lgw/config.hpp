#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lgw/cdk.hpp"
#include "lgw/synthetic.hpp"

namespace lgw {

/// Flat pipeline configuration. Locally chosen defaults are echoed with a
/// `choice` mark; the rest are the method's established settings.
struct PipelineConfig {
  int n_seeds = 300;
  std::vector<int> layers = {0, 3, 6, 9};
  CdkParams cdk;
  int first_pass_k = 500;
  int dict_size = 1000;
  /// Per-layer overrides; 0 or absent means dict_size.
  std::map<int, int> dict_size_by_layer;
  std::string fusion = "selected-surf";
  std::size_t subsample_cap = 5000;
  std::uint64_t rng_seed = 42;
  std::size_t threads = 0;
  std::string kernel_backend = "auto";
  int kmeans_max_iters = 100;
  std::vector<int> sweep_sizes = {50, 100, 250, 500, 1000, 2500, 5000};
  SyntheticSpec synth;

  int dict_size_for(int layer) const;
};

/// Parses a `key = value` file with `#` comments and validates the result.
PipelineConfig load_config_file(const std::string& path);

/// Applies one `key=value` assignment (the --set flag).
void apply_config_override(PipelineConfig& cfg, const std::string& assignment);

void validate_config(const PipelineConfig& cfg);

/// One `key = value` line per key in fixed order; defaults that are
/// implementation choices carry a `# choice` marker.
std::vector<std::string> config_echo(const PipelineConfig& cfg);

inline constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ull;

std::uint64_t fnv1a64(const void* data, std::size_t len,
                      std::uint64_t h = kFnvOffset);

std::uint64_t fnv1a64(const std::string& s, std::uint64_t h = kFnvOffset);

/// Hash of the semantic configuration, the resolved kernel backend, and the
/// dataset identity. Worker counts and sweep/synth knobs are excluded; they
/// must not change artifact content.
std::string config_hash_hex(const PipelineConfig& cfg,
                            const std::string& dataset_hash);

std::string format_double(double v);

}  // namespace lgw
