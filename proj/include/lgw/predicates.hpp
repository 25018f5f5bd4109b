#pragma once

#include "lgw/geometry.hpp"

namespace lgw {

/// Exact sign of the CCW test: +1 if a->b->c turns left, -1 if right,
/// 0 if collinear. Uses a floating-point filter with an exact rational
/// fallback, so the answer is always the true sign.
int orient2d(const Pt& a, const Pt& b, const Pt& c);

/// Exact sign of the incircle test. For a CCW triangle (a, b, c): +1 when d
/// is strictly inside the circumcircle, -1 strictly outside, 0 on it.
int incircle(const Pt& a, const Pt& b, const Pt& c, const Pt& d);

/// incircle with symbolic perturbation of the lifting coordinate, so
/// cocircular quadruples resolve deterministically and the result is never
/// 0. Each point carries a perturbation rank; ranks must be distinct, and
/// any global permutation-invariant assignment (here: lexicographic rank
/// within the point set) gives a consistent weighted-Delaunay tie-break.
/// Requires that not all four points are collinear.
int incircle_perturbed(const Pt& a, int ra, const Pt& b, int rb, const Pt& c,
                       int rc, const Pt& d, int rd);

}  // namespace lgw
