#pragma once

namespace lgw {

struct Pt {
  double x = 0.0;
  double y = 0.0;
};

inline bool lex_less(const Pt& a, const Pt& b) {
  return a.x < b.x || (a.x == b.x && a.y < b.y);
}

inline bool same_point(const Pt& a, const Pt& b) {
  return a.x == b.x && a.y == b.y;
}

inline double sq_dist(const Pt& a, const Pt& b) {
  double dx = a.x - b.x;
  double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

}  // namespace lgw
