#pragma once

#include <string>
#include <vector>

#include "lgw/cdk.hpp"
#include "lgw/codebook.hpp"
#include "lgw/graph.hpp"

namespace lgw {

struct SignatureBlock {
  std::string tag;
  std::vector<double> values;
};

/// Ordered, individually normalized histogram blocks. Blocks keep unit mass
/// after fusion so L1 weights every block equally.
struct Signature {
  std::string image_id;
  std::vector<SignatureBlock> blocks;
};

/// Index of the dictionary word with minimal rho to the feature; ties take
/// the smallest index. Assignment never rejects.
int assign_word(const GraphFeature& feature, const Dictionary& dict,
                const CdkParams& params);

/// Histogram of word assignments divided by the feature count; sums to 1.
/// An empty feature list is an error, not an all-zero block.
std::vector<double> encode_layer_signature(
    const std::vector<GraphFeature>& features, const Dictionary& dict,
    const CdkParams& params, std::size_t threads);

/// Nearest-centroid histogram over raw descriptors, squared L2, ties to the
/// smallest centroid index.
std::vector<double> encode_baseline_signature(
    const std::vector<std::vector<double>>& descriptors,
    const std::vector<std::vector<double>>& centroids, std::size_t threads);

/// Concatenates blocks in the given order without re-normalizing.
Signature fuse_signatures(
    const std::string& image_id,
    const std::vector<std::pair<std::string, std::vector<double>>>& blocks);

/// Sum of |a_i - b_i| over the full concatenation. Requires identical block
/// structure (tags and lengths).
double l1_distance(const Signature& a, const Signature& b);

}  // namespace lgw
