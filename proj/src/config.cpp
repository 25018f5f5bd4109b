#include "lgw/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "lgw/error.hpp"
#include "lgw/graph.hpp"
#include "lgw/kernels.hpp"

namespace lgw {
namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

long long parse_int(const std::string& key, const std::string& value) {
  long long out = 0;
  const char* first = value.data();
  const char* last = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last) {
    fail("config key '", key, "' needs an integer, got '", value, "'");
  }
  return out;
}

std::uint64_t parse_uint(const std::string& key, const std::string& value) {
  std::uint64_t out = 0;
  const char* first = value.data();
  const char* last = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last) {
    fail("config key '", key, "' needs a non-negative integer, got '", value,
         "'");
  }
  return out;
}

double parse_double(const std::string& key, const std::string& value) {
  double out = 0.0;
  const char* first = value.data();
  const char* last = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last) {
    fail("config key '", key, "' needs a number, got '", value, "'");
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& key,
                                const std::string& value) {
  std::vector<int> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) {
      fail("config key '", key, "' has an empty list entry in '", value, "'");
    }
    out.push_back(static_cast<int>(parse_int(key, item)));
  }
  if (out.empty()) {
    fail("config key '", key, "' needs a non-empty list");
  }
  return out;
}

void set_key(PipelineConfig& cfg, const std::string& key,
             const std::string& value) {
  if (key == "n_seeds") {
    cfg.n_seeds = static_cast<int>(parse_int(key, value));
  } else if (key == "layers") {
    cfg.layers = parse_int_list(key, value);
  } else if (key == "alpha") {
    cfg.cdk.alpha = parse_double(key, value);
  } else if (key == "beta") {
    cfg.cdk.beta = parse_double(key, value);
  } else if (key == "iterations") {
    cfg.cdk.iterations = static_cast<int>(parse_int(key, value));
  } else if (key == "first_pass_k") {
    cfg.first_pass_k = static_cast<int>(parse_int(key, value));
  } else if (key == "dict_size") {
    cfg.dict_size = static_cast<int>(parse_int(key, value));
  } else if (key == "dict_size_0" || key == "dict_size_3" ||
             key == "dict_size_6" || key == "dict_size_9") {
    const int layer = key.back() - '0';
    cfg.dict_size_by_layer[layer] = static_cast<int>(parse_int(key, value));
  } else if (key == "fusion") {
    cfg.fusion = value;
  } else if (key == "subsample_cap") {
    cfg.subsample_cap = static_cast<std::size_t>(parse_uint(key, value));
  } else if (key == "rng_seed") {
    cfg.rng_seed = parse_uint(key, value);
  } else if (key == "threads") {
    cfg.threads = static_cast<std::size_t>(parse_uint(key, value));
  } else if (key == "kernel_backend") {
    cfg.kernel_backend = value;
  } else if (key == "kmeans_max_iters") {
    cfg.kmeans_max_iters = static_cast<int>(parse_int(key, value));
  } else if (key == "sweep_sizes") {
    cfg.sweep_sizes = parse_int_list(key, value);
  } else if (key == "synth_categories") {
    cfg.synth.n_categories = static_cast<int>(parse_int(key, value));
  } else if (key == "synth_images_per_category") {
    cfg.synth.images_per_category = static_cast<int>(parse_int(key, value));
  } else if (key == "synth_train_per_category") {
    cfg.synth.train_per_category = static_cast<int>(parse_int(key, value));
  } else if (key == "synth_keypoints") {
    cfg.synth.keypoints_per_image = static_cast<int>(parse_int(key, value));
  } else if (key == "synth_dim") {
    cfg.synth.descriptor_dim = static_cast<int>(parse_int(key, value));
  } else if (key == "synth_separation") {
    cfg.synth.cluster_separation = parse_double(key, value);
  } else {
    fail("unknown config key '", key, "'");
  }
}

std::string join_ints(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(v[i]);
  }
  return out;
}

}  // namespace

int PipelineConfig::dict_size_for(int layer) const {
  auto it = dict_size_by_layer.find(layer);
  if (it != dict_size_by_layer.end() && it->second > 0) return it->second;
  return dict_size;
}

PipelineConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    fail("cannot open config file '", path, "'");
  }
  PipelineConfig cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      fail(path, ":", line_no, ": expected 'key = value', got '", line, "'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      fail(path, ":", line_no, ": empty config key");
    }
    set_key(cfg, key, value);
  }
  validate_config(cfg);
  return cfg;
}

void apply_config_override(PipelineConfig& cfg,
                           const std::string& assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string::npos) {
    fail("override '", assignment, "' is not of the form key=value");
  }
  const std::string key = trim(assignment.substr(0, eq));
  const std::string value = trim(assignment.substr(eq + 1));
  if (key.empty()) {
    fail("override '", assignment, "' has an empty key");
  }
  set_key(cfg, key, value);
}

void validate_config(const PipelineConfig& cfg) {
  if (cfg.n_seeds < 1) {
    fail("n_seeds must be positive, got ", cfg.n_seeds);
  }
  if (cfg.layers.empty()) {
    fail("layers must be non-empty");
  }
  std::vector<int> sorted = cfg.layers;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (!valid_layer(sorted[i])) {
      fail("unknown layer ", sorted[i], "; known layers are 0, 3, 6, 9");
    }
    if (i && sorted[i] == sorted[i - 1]) {
      fail("layer ", sorted[i], " listed twice");
    }
  }
  if (!(cfg.cdk.alpha >= 0.0)) {
    fail("alpha must be non-negative, got ", cfg.cdk.alpha);
  }
  if (!(cfg.cdk.beta > 0.0)) {
    fail("beta must be positive, got ", cfg.cdk.beta);
  }
  if (cfg.cdk.iterations < 0) {
    fail("iterations must be non-negative, got ", cfg.cdk.iterations);
  }
  if (cfg.first_pass_k < 1) {
    fail("first_pass_k must be positive, got ", cfg.first_pass_k);
  }
  if (cfg.dict_size < 1) {
    fail("dict_size must be positive, got ", cfg.dict_size);
  }
  for (const auto& [layer, size] : cfg.dict_size_by_layer) {
    if (size < 0) {
      fail("dict_size_", layer, " must be non-negative, got ", size);
    }
  }
  if (cfg.fusion != "selected-surf" && cfg.fusion != "kmeans-baseline") {
    fail("fusion must be 'selected-surf' or 'kmeans-baseline', got '",
         cfg.fusion, "'");
  }
  kernels::parse_backend(cfg.kernel_backend);
  if (cfg.kmeans_max_iters < 1) {
    fail("kmeans_max_iters must be positive, got ", cfg.kmeans_max_iters);
  }
  if (cfg.sweep_sizes.empty()) {
    fail("sweep_sizes must be non-empty");
  }
  for (int s : cfg.sweep_sizes) {
    if (s < 1) {
      fail("sweep size ", s, " must be positive");
    }
  }
}

std::vector<std::string> config_echo(const PipelineConfig& cfg) {
  std::vector<std::string> out;
  auto line = [&](const std::string& key, const std::string& value) {
    out.push_back(key + " = " + value);
  };
  // Defaults that are implementation choices rather than established
  // settings carry a "# choice" marker.
  auto choice = [&](const std::string& key, const std::string& value) {
    out.push_back(key + " = " + value + "  # choice");
  };
  line("n_seeds", std::to_string(cfg.n_seeds));
  line("layers", join_ints(cfg.layers));
  line("alpha", format_double(cfg.cdk.alpha));
  line("beta", format_double(cfg.cdk.beta));
  line("iterations", std::to_string(cfg.cdk.iterations));
  line("first_pass_k", std::to_string(cfg.first_pass_k));
  choice("dict_size", std::to_string(cfg.dict_size));
  for (int layer : {0, 3, 6, 9}) {
    auto it = cfg.dict_size_by_layer.find(layer);
    if (it != cfg.dict_size_by_layer.end()) {
      choice("dict_size_" + std::to_string(layer),
             std::to_string(it->second));
    }
  }
  line("fusion", cfg.fusion);
  choice("subsample_cap", std::to_string(cfg.subsample_cap));
  choice("rng_seed", std::to_string(cfg.rng_seed));
  // threads is a scheduling knob: results are schedule-independent, so it
  // appears in no artifact (echo or hash).
  choice("kernel_backend", cfg.kernel_backend);
  choice("kmeans_max_iters", std::to_string(cfg.kmeans_max_iters));
  choice("sweep_sizes", join_ints(cfg.sweep_sizes));
  choice("synth_categories", std::to_string(cfg.synth.n_categories));
  choice("synth_images_per_category",
         std::to_string(cfg.synth.images_per_category));
  choice("synth_train_per_category",
         std::to_string(cfg.synth.train_per_category));
  choice("synth_keypoints", std::to_string(cfg.synth.keypoints_per_image));
  choice("synth_dim", std::to_string(cfg.synth.descriptor_dim));
  choice("synth_separation", format_double(cfg.synth.cluster_separation));
  return out;
}

std::uint64_t fnv1a64(const void* data, std::size_t len, std::uint64_t h) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

std::uint64_t fnv1a64(const std::string& s, std::uint64_t h) {
  return fnv1a64(s.data(), s.size(), h);
}

std::string config_hash_hex(const PipelineConfig& cfg,
                            const std::string& dataset_hash) {
  std::vector<int> layers = cfg.layers;
  std::sort(layers.begin(), layers.end());

  std::string canon;
  auto add = [&](const std::string& key, const std::string& value) {
    canon += key;
    canon += '=';
    canon += value;
    canon += '\n';
  };
  add("n_seeds", std::to_string(cfg.n_seeds));
  add("layers", join_ints(layers));
  add("alpha", format_double(cfg.cdk.alpha));
  add("beta", format_double(cfg.cdk.beta));
  add("iterations", std::to_string(cfg.cdk.iterations));
  add("first_pass_k", std::to_string(cfg.first_pass_k));
  for (int layer : layers) {
    add("dict_size_" + std::to_string(layer),
        std::to_string(cfg.dict_size_for(layer)));
  }
  add("fusion", cfg.fusion);
  add("subsample_cap", std::to_string(cfg.subsample_cap));
  add("rng_seed", std::to_string(cfg.rng_seed));
  add("kmeans_max_iters", std::to_string(cfg.kmeans_max_iters));
  add("backend",
      kernels::backend_name(kernels::parse_backend(cfg.kernel_backend)));
  add("dataset", dataset_hash);

  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(canon)));
  return std::string(buf);
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) {
    fail("cannot format double");
  }
  return std::string(buf, ptr);
}

}  // namespace lgw
