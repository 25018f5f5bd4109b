#include "lgw/delaunay.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "lgw/error.hpp"
#include "lgw/predicates.hpp"

// Incremental Bowyer-Watson over a lexicographically sorted insertion order,
// with ghost triangles past every hull edge so exterior insertion, hull
// growth, and interior insertion are all the same cavity operation. All
// orientation and incircle decisions go through the exact predicates;
// cocircular ties resolve by symbolic perturbation keyed on lexicographic
// rank, which makes the output independent of the input point order.

namespace lgw {
namespace {

constexpr int kGhost = -1;

struct Tri {
  std::array<int, 3> v;  // kGhost appears at slot 2 only
  std::array<int, 3> n;  // n[i] = triangle across edge (v[i+1] -> v[i+2])
  bool alive = true;
  bool ghost() const { return v[2] == kGhost; }
};

struct Mesh {
  const std::vector<Pt>& pts;
  const std::vector<int>& rank;
  std::vector<Tri> tris;

  std::pair<int, int> face(int t, int i) const {
    return {tris[t].v[(i + 1) % 3], tris[t].v[(i + 2) % 3]};
  }

  int slot_of_face(int t, int x, int y) const {
    for (int i = 0; i < 3; ++i) {
      auto f = face(t, i);
      if (f.first == x && f.second == y) return i;
    }
    fail("delaunay: mesh adjacency corrupted");
  }

  // Wires every face of the given triangles against its reverse, which must
  // also be present among them (used for the initial closed mesh).
  void wire_all(const std::vector<int>& ids) {
    std::map<std::pair<int, int>, std::pair<int, int>> byface;
    for (int t : ids) {
      for (int i = 0; i < 3; ++i) byface[face(t, i)] = {t, i};
    }
    for (auto& [e, slot] : byface) {
      auto it = byface.find({e.second, e.first});
      if (it == byface.end()) fail("delaunay: open initial mesh");
      tris[slot.first].n[slot.second] = it->second.first;
    }
  }

  bool is_bad(int t, int p_idx) const {
    const Tri& T = tris[t];
    const Pt& p = pts[p_idx];
    if (T.ghost()) {
      // Stored (g0, g1, G); the hull edge with interior on its left runs
      // v[1] -> v[0]. The ghost "circumcircle" is the open halfplane right
      // of that edge plus the open edge segment itself.
      const Pt& a = pts[T.v[1]];
      const Pt& b = pts[T.v[0]];
      int o = orient2d(a, b, p);
      if (o != 0) return o < 0;
      const Pt& lo = lex_less(a, b) ? a : b;
      const Pt& hi = lex_less(a, b) ? b : a;
      return lex_less(lo, p) && lex_less(p, hi);
    }
    return incircle_perturbed(pts[T.v[0]], rank[T.v[0]], pts[T.v[1]],
                              rank[T.v[1]], pts[T.v[2]], rank[T.v[2]], p,
                              rank[p_idx]) > 0;
  }

  static std::array<int, 3> ghost_to_back(std::array<int, 3> v) {
    while ((v[0] == kGhost || v[1] == kGhost) && v[2] != kGhost) {
      v = {v[1], v[2], v[0]};
    }
    return v;
  }

  void insert(int p) {
    std::size_t old_count = tris.size();
    std::vector<char> bad(old_count, 0);
    bool any = false;
    for (std::size_t t = 0; t < old_count; ++t) {
      if (tris[t].alive && is_bad(static_cast<int>(t), p)) {
        bad[t] = 1;
        any = true;
      }
    }
    if (!any) fail("delaunay: empty cavity (duplicate point?)");

    struct BFace {
      int u, w, keep;
    };
    std::vector<BFace> boundary;
    for (std::size_t t = 0; t < old_count; ++t) {
      if (!tris[t].alive || !bad[t]) continue;
      for (int i = 0; i < 3; ++i) {
        int nb = tris[t].n[i];
        if (!bad[nb]) {
          auto [u, w] = face(static_cast<int>(t), i);
          boundary.push_back({u, w, nb});
        }
      }
    }

    std::map<std::pair<int, int>, std::pair<int, int>> open_faces;
    for (const BFace& bf : boundary) {
      std::array<int, 3> vv = ghost_to_back({bf.u, bf.w, p});
      int id = static_cast<int>(tris.size());
      tris.push_back(Tri{vv, {-2, -2, -2}, true});
      int s = slot_of_face(id, bf.u, bf.w);
      tris[id].n[s] = bf.keep;
      tris[bf.keep].n[slot_of_face(bf.keep, bf.w, bf.u)] = id;
      for (int i = 0; i < 3; ++i) {
        if (i != s) open_faces[face(id, i)] = {id, i};
      }
    }
    for (auto& [e, slot] : open_faces) {
      auto it = open_faces.find({e.second, e.first});
      if (it == open_faces.end()) fail("delaunay: cavity boundary not closed");
      tris[slot.first].n[slot.second] = it->second.first;
    }
    for (std::size_t t = 0; t < old_count; ++t) {
      if (bad[t]) tris[t].alive = false;
    }
  }
};

Triangulation collinear_path(const std::vector<int>& order) {
  Triangulation out;
  for (std::size_t i = 0; i + 1 < order.size(); ++i) {
    int a = order[i];
    int b = order[i + 1];
    out.edges.emplace_back(std::min(a, b), std::max(a, b));
  }
  std::sort(out.edges.begin(), out.edges.end());
  return out;
}

}  // namespace

Triangulation delaunay_full(const std::vector<Pt>& points) {
  const int n = static_cast<int>(points.size());
  if (n < 2) fail("delaunay: need at least 2 distinct points, got ", n);

  std::vector<int> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return lex_less(points[a], points[b]) ||
           (same_point(points[a], points[b]) && a < b);
  });
  for (int i = 0; i + 1 < n; ++i) {
    if (same_point(points[order[i]], points[order[i + 1]])) {
      fail("delaunay: duplicate point at indices ", order[i], " and ",
           order[i + 1]);
    }
  }

  // Permutation-invariant perturbation key: rank in lexicographic order.
  std::vector<int> rank(points.size());
  for (int i = 0; i < n; ++i) rank[order[i]] = i;

  // First point breaking collinearity with the initial pair; everything
  // before it lies on that line, sorted along it.
  int apex = -1;
  for (int i = 2; i < n; ++i) {
    if (orient2d(points[order[0]], points[order[1]], points[order[i]]) != 0) {
      apex = i;
      break;
    }
  }
  if (apex < 0) return collinear_path(order);

  Mesh mesh{points, rank, {}};
  int a = order[0];
  int b = order[1];
  int c = order[apex];
  if (orient2d(points[a], points[b], points[c]) < 0) std::swap(b, c);
  mesh.tris.push_back(Tri{{a, b, c}, {-2, -2, -2}, true});
  mesh.tris.push_back(Tri{{b, a, kGhost}, {-2, -2, -2}, true});
  mesh.tris.push_back(Tri{{c, b, kGhost}, {-2, -2, -2}, true});
  mesh.tris.push_back(Tri{{a, c, kGhost}, {-2, -2, -2}, true});
  mesh.wire_all({0, 1, 2, 3});

  for (int i = 2; i < n; ++i) {
    if (i == apex) continue;
    mesh.insert(order[i]);
  }

  Triangulation out;
  std::set<std::pair<int, int>> edges;
  for (const Tri& t : mesh.tris) {
    if (!t.alive || t.ghost()) continue;
    std::array<int, 3> v = t.v;
    std::sort(v.begin(), v.end());
    out.triangles.push_back(v);
    edges.insert({v[0], v[1]});
    edges.insert({v[0], v[2]});
    edges.insert({v[1], v[2]});
  }
  std::sort(out.triangles.begin(), out.triangles.end());
  out.edges.assign(edges.begin(), edges.end());
  return out;
}

std::vector<std::pair<int, int>> delaunay_triangulate(
    const std::vector<Pt>& points) {
  return delaunay_full(points).edges;
}

}  // namespace lgw
