#pragma once

#include <vector>

#include "lgw/graph.hpp"

namespace lgw {

struct CdkParams {
  double alpha = 0.0001;
  double beta = 0.1;
  int iterations = 2;
};

/// Union of two same-layer graphs: D holds pairwise squared-L2 descriptor
/// distances over the concatenated node set (A's nodes first), T the crisp
/// block-diagonal adjacency (cross-graph blocks all zero). Both are
/// (m+n) x (m+n), row-major.
struct UnionMatrices {
  int m = 0;
  int n = 0;
  std::vector<double> dist;
  std::vector<double> topo;
};

UnionMatrices build_union_matrices(const GraphFeature& a,
                                   const GraphFeature& b);

/// Context Dependent Kernel: K(0) = exp(-D/beta) / ||.||_1, then
/// K(t) = G / ||G||_1 with G = exp(-D/beta + (alpha/beta) * T K(t-1) T),
/// where ||M||_1 sums |entries|. Returns K(iterations), row-major.
std::vector<double> cdk_kernel(const UnionMatrices& u, const CdkParams& p);

/// Dissimilarity rho in [0, 1]. For layer > 0: s(A,A)+s(B,B)-2 s(A,B) over
/// the kernel's blocks; for layer 0: squared descriptor distance / 4.
/// Symmetric bit-exactly: the union is always evaluated with the two graphs
/// in canonical order (graph_precedes).
double graph_dissimilarity(const GraphFeature& a, const GraphFeature& b,
                           const CdkParams& p);

/// Total order over graphs (layer, node count, descriptors, edges,
/// image id, seed) used to canonicalize kernel evaluation order.
bool graph_precedes(const GraphFeature& a, const GraphFeature& b);

}  // namespace lgw
