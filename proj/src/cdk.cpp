#include "lgw/cdk.hpp"

#include <algorithm>
#include <cmath>

#include "lgw/error.hpp"
#include "lgw/kernels.hpp"

namespace lgw {

namespace {

void add_edges(std::vector<double>& topo, int stride, int offset,
               const GraphFeature& g) {
  int count = static_cast<int>(g.nodes.size());
  for (auto [a, b] : g.edges) {
    if (a < 0 || b < 0 || a >= count || b >= count) {
      fail("graph edge (", a, ",", b, ") out of range for ", count, " nodes");
    }
    if (a == b) fail("graph has a self-loop at node ", a);
    topo[static_cast<std::size_t>(offset + a) * stride + offset + b] = 1.0;
    topo[static_cast<std::size_t>(offset + b) * stride + offset + a] = 1.0;
  }
}

std::vector<std::vector<int>> adjacency(const UnionMatrices& u) {
  int total = u.m + u.n;
  std::vector<std::vector<int>> adj(total);
  for (int i = 0; i < total; ++i) {
    for (int j = 0; j < total; ++j) {
      if (u.topo[static_cast<std::size_t>(i) * total + j] != 0.0) {
        adj[i].push_back(j);
      }
    }
  }
  return adj;
}

double block_sum(const std::vector<double>& k, int total, int r0, int r1,
                 int c0, int c1) {
  double acc = 0.0;
  for (int i = r0; i < r1; ++i) {
    for (int j = c0; j < c1; ++j) {
      acc += k[static_cast<std::size_t>(i) * total + j];
    }
  }
  return acc;
}

}  // namespace

UnionMatrices build_union_matrices(const GraphFeature& a,
                                   const GraphFeature& b) {
  if (a.layer != b.layer) {
    fail("layer mismatch: ", a.layer, " vs ", b.layer);
  }
  if (a.layer == 0) fail("layer-0 graphs have no union matrices");
  if (a.nodes.empty() || b.nodes.empty()) fail("graph has no nodes");
  std::size_t dim = a.nodes[0].size();
  for (const GraphFeature* g : {&a, &b}) {
    for (const auto& d : g->nodes) {
      if (d.size() != dim) {
        fail("descriptor dimension mismatch: ", d.size(), " vs ", dim);
      }
    }
  }

  UnionMatrices u;
  u.m = static_cast<int>(a.nodes.size());
  u.n = static_cast<int>(b.nodes.size());
  int total = u.m + u.n;
  u.dist.assign(static_cast<std::size_t>(total) * total, 0.0);
  u.topo.assign(static_cast<std::size_t>(total) * total, 0.0);

  const auto& ops = kernels::ops();
  auto desc = [&](int i) -> const double* {
    return i < u.m ? a.nodes[i].data() : b.nodes[i - u.m].data();
  };
  for (int i = 0; i < total; ++i) {
    for (int j = i + 1; j < total; ++j) {
      double d = ops.sq_l2(desc(i), desc(j), dim);
      u.dist[static_cast<std::size_t>(i) * total + j] = d;
      u.dist[static_cast<std::size_t>(j) * total + i] = d;
    }
  }
  add_edges(u.topo, total, 0, a);
  add_edges(u.topo, total, u.m, b);
  return u;
}

std::vector<double> cdk_kernel(const UnionMatrices& u, const CdkParams& p) {
  if (p.alpha < 0.0 || p.beta <= 0.0 || p.iterations < 0) {
    fail("invalid CDK params: alpha=", p.alpha, " beta=", p.beta,
         " iterations=", p.iterations);
  }
  const int total = u.m + u.n;
  const std::size_t size = static_cast<std::size_t>(total) * total;
  const auto& ops = kernels::ops();
  const double c0 = -1.0 / p.beta;
  const double c1 = p.alpha / p.beta;

  auto normalize = [&](std::vector<double>& k) {
    double norm = ops.sum_abs(k.data(), size);
    if (!std::isfinite(norm) || norm <= 0.0) {
      fail("CDK normalization degenerate (norm = ", norm, ")");
    }
    ops.scale(k.data(), size, 1.0 / norm);
  };

  std::vector<double> k(size);
  ops.exp_affine(k.data(), u.dist.data(), nullptr, size, c0, 0.0);
  normalize(k);
  if (p.iterations == 0) return k;

  const auto adj = adjacency(u);
  std::vector<double> tk(size);
  std::vector<double> tkt(size);
  std::vector<double> g(size);
  for (int t = 0; t < p.iterations; ++t) {
    // T*K as row sums over neighbors, in ascending neighbor order.
    std::fill(tk.begin(), tk.end(), 0.0);
    for (int i = 0; i < total; ++i) {
      double* row = tk.data() + static_cast<std::size_t>(i) * total;
      for (int q : adj[i]) {
        ops.add_inplace(row, k.data() + static_cast<std::size_t>(q) * total,
                        total);
      }
    }
    // (T*K)*T columnwise, again in ascending neighbor order.
    for (int i = 0; i < total; ++i) {
      const double* row = tk.data() + static_cast<std::size_t>(i) * total;
      double* out = tkt.data() + static_cast<std::size_t>(i) * total;
      for (int j = 0; j < total; ++j) {
        double acc = 0.0;
        for (int q : adj[j]) acc += row[q];
        out[j] = acc;
      }
    }
    ops.exp_affine(g.data(), u.dist.data(), tkt.data(), size, c0, c1);
    k.swap(g);
    normalize(k);
  }
  return k;
}

bool graph_precedes(const GraphFeature& a, const GraphFeature& b) {
  if (a.layer != b.layer) return a.layer < b.layer;
  if (a.nodes.size() != b.nodes.size()) return a.nodes.size() < b.nodes.size();
  if (a.nodes != b.nodes) return a.nodes < b.nodes;
  if (a.edges != b.edges) return a.edges < b.edges;
  if (a.image_id != b.image_id) return a.image_id < b.image_id;
  return a.seed_index < b.seed_index;
}

double graph_dissimilarity(const GraphFeature& a, const GraphFeature& b,
                           const CdkParams& p) {
  if (a.layer != b.layer) {
    fail("layer mismatch: ", a.layer, " vs ", b.layer);
  }
  if (a.layer == 0) {
    if (a.nodes.size() != 1 || b.nodes.size() != 1) {
      fail("layer-0 graph must have exactly one node");
    }
    if (a.nodes[0].size() != b.nodes[0].size()) {
      fail("descriptor dimension mismatch");
    }
    double d =
        kernels::ops().sq_l2(a.nodes[0].data(), b.nodes[0].data(),
                             a.nodes[0].size()) /
        4.0;
    return std::max(0.0, d);
  }

  const GraphFeature* first = &a;
  const GraphFeature* second = &b;
  if (graph_precedes(b, a)) std::swap(first, second);

  UnionMatrices u = build_union_matrices(*first, *second);
  std::vector<double> k = cdk_kernel(u, p);
  int total = u.m + u.n;
  double s_aa = block_sum(k, total, 0, u.m, 0, u.m);
  double s_bb = block_sum(k, total, u.m, total, u.m, total);
  double s_ab = block_sum(k, total, 0, u.m, u.m, total);
  double rho = s_aa + s_bb - 2.0 * s_ab;
  return std::max(0.0, rho);
}

}  // namespace lgw
