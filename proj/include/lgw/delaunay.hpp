#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "lgw/geometry.hpp"

namespace lgw {

/// Result of triangulating a planar point set. Triangles are index triples
/// sorted ascending internally and listed in sorted order; edges are (a, b)
/// pairs with a < b, sorted lexicographically. For fully collinear input the
/// triangle list is empty and the edges form the path along the line.
struct Triangulation {
  std::vector<std::array<int, 3>> triangles;
  std::vector<std::pair<int, int>> edges;
};

/// Delaunay triangulation with deterministic, permutation-invariant
/// handling of cocircular points (symbolic perturbation keyed on each
/// point's lexicographic rank). Points must be pairwise distinct and there
/// must be at least 2 of them; violations raise lgw::Error. The returned
/// edge set depends only on the point set, not on input order.
Triangulation delaunay_full(const std::vector<Pt>& points);

/// Edge set only (the common case).
std::vector<std::pair<int, int>> delaunay_triangulate(
    const std::vector<Pt>& points);

}  // namespace lgw
