#include "lgw/signature.hpp"

#include <algorithm>
#include <limits>
#include <set>

#include "lgw/error.hpp"
#include "lgw/kernels.hpp"
#include "lgw/parallel.hpp"

namespace lgw {

int assign_word(const GraphFeature& feature, const Dictionary& dict,
                const CdkParams& params) {
  if (feature.layer != dict.layer) {
    fail("cannot assign a layer-", feature.layer,
         " feature against a layer-", dict.layer, " dictionary");
  }
  if (dict.words.empty()) {
    fail("dictionary for layer ", dict.layer, " has no words");
  }
  int best = 0;
  double best_rho = std::numeric_limits<double>::infinity();
  for (std::size_t w = 0; w < dict.words.size(); ++w) {
    const double rho = graph_dissimilarity(feature, dict.words[w], params);
    if (rho < best_rho) {
      best_rho = rho;
      best = static_cast<int>(w);
    }
  }
  return best;
}

std::vector<double> encode_layer_signature(
    const std::vector<GraphFeature>& features, const Dictionary& dict,
    const CdkParams& params, std::size_t threads) {
  if (features.empty()) {
    fail("no features at layer ", dict.layer,
         "; image is unencodable at this layer");
  }
  std::vector<int> assigned(features.size());
  parallel_for(features.size(), threads, [&](std::size_t i) {
    assigned[i] = assign_word(features[i], dict, params);
  });

  std::vector<double> hist(dict.words.size(), 0.0);
  for (int w : assigned) {
    hist[w] += 1.0;
  }
  const double n = static_cast<double>(features.size());
  for (double& v : hist) {
    v /= n;
  }
  return hist;
}

std::vector<double> encode_baseline_signature(
    const std::vector<std::vector<double>>& descriptors,
    const std::vector<std::vector<double>>& centroids, std::size_t threads) {
  if (descriptors.empty()) {
    fail("no descriptors; image is unencodable by the baseline");
  }
  if (centroids.empty()) {
    fail("baseline dictionary has no centroids");
  }
  const std::size_t dim = centroids[0].size();
  std::vector<int> assigned(descriptors.size());
  parallel_for(descriptors.size(), threads, [&](std::size_t i) {
    if (descriptors[i].size() != dim) {
      fail("descriptor dimension ", descriptors[i].size(),
           " does not match centroid dimension ", dim);
    }
    double best = std::numeric_limits<double>::infinity();
    int best_c = 0;
    for (std::size_t c = 0; c < centroids.size(); ++c) {
      const double d = kernels::ops().sq_l2(descriptors[i].data(),
                                            centroids[c].data(), dim);
      if (d < best) {
        best = d;
        best_c = static_cast<int>(c);
      }
    }
    assigned[i] = best_c;
  });

  std::vector<double> hist(centroids.size(), 0.0);
  for (int c : assigned) {
    hist[c] += 1.0;
  }
  const double n = static_cast<double>(descriptors.size());
  for (double& v : hist) {
    v /= n;
  }
  return hist;
}

Signature fuse_signatures(
    const std::string& image_id,
    const std::vector<std::pair<std::string, std::vector<double>>>& blocks) {
  if (blocks.empty()) {
    fail("signature fusion needs at least one block");
  }
  std::set<std::string> seen;
  Signature sig;
  sig.image_id = image_id;
  for (const auto& [tag, values] : blocks) {
    if (!seen.insert(tag).second) {
      fail("duplicate signature block tag '", tag, "'");
    }
    sig.blocks.push_back({tag, values});
  }
  return sig;
}

double l1_distance(const Signature& a, const Signature& b) {
  if (a.blocks.size() != b.blocks.size()) {
    fail("signatures have ", a.blocks.size(), " vs ", b.blocks.size(),
         " blocks");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < a.blocks.size(); ++i) {
    const SignatureBlock& ba = a.blocks[i];
    const SignatureBlock& bb = b.blocks[i];
    if (ba.tag != bb.tag) {
      fail("signature block ", i, " tags differ: '", ba.tag, "' vs '",
           bb.tag, "'");
    }
    if (ba.values.size() != bb.values.size()) {
      fail("signature block '", ba.tag, "' lengths differ: ",
           ba.values.size(), " vs ", bb.values.size());
    }
    total += kernels::ops().l1_dist(ba.values.data(), bb.values.data(),
                                    ba.values.size());
  }
  return total;
}

}  // namespace lgw
