#include "lgw/predicates.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <array>
#include <cmath>

#include "lgw/error.hpp"

namespace lgw {

namespace {

using Rational = boost::multiprecision::cpp_rational;

// Static filter constants for double precision (machine epsilon 2^-53).
constexpr double kEps = 1.1102230246251565e-16;
constexpr double kOrientBound = (3.0 + 16.0 * kEps) * kEps;
constexpr double kIncircleBound = (10.0 + 96.0 * kEps) * kEps;

int sign_of(const Rational& r) {
  if (r > 0) return 1;
  if (r < 0) return -1;
  return 0;
}

int orient2d_exact(const Pt& a, const Pt& b, const Pt& c) {
  Rational ax(a.x), ay(a.y), bx(b.x), by(b.y), cx(c.x), cy(c.y);
  Rational det = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);
  return sign_of(det);
}

int incircle_exact(const Pt& a, const Pt& b, const Pt& c, const Pt& d) {
  Rational adx = Rational(a.x) - Rational(d.x);
  Rational ady = Rational(a.y) - Rational(d.y);
  Rational bdx = Rational(b.x) - Rational(d.x);
  Rational bdy = Rational(b.y) - Rational(d.y);
  Rational cdx = Rational(c.x) - Rational(d.x);
  Rational cdy = Rational(c.y) - Rational(d.y);

  Rational alift = adx * adx + ady * ady;
  Rational blift = bdx * bdx + bdy * bdy;
  Rational clift = cdx * cdx + cdy * cdy;

  Rational det = alift * (bdx * cdy - cdx * bdy) +
                 blift * (cdx * ady - adx * cdy) +
                 clift * (adx * bdy - bdx * ady);
  return sign_of(det);
}

}  // namespace

int orient2d(const Pt& a, const Pt& b, const Pt& c) {
  double detleft = (b.x - a.x) * (c.y - a.y);
  double detright = (b.y - a.y) * (c.x - a.x);
  double det = detleft - detright;

  double detsum;
  if (detleft > 0.0) {
    if (detright <= 0.0) return det > 0.0 ? 1 : (det < 0.0 ? -1 : 0);
    detsum = detleft + detright;
  } else if (detleft < 0.0) {
    if (detright >= 0.0) return det > 0.0 ? 1 : (det < 0.0 ? -1 : 0);
    detsum = -detleft - detright;
  } else {
    return detright > 0.0 ? -1 : (detright < 0.0 ? 1 : 0);
  }

  double errbound = kOrientBound * detsum;
  if (det >= errbound) return 1;
  if (-det >= errbound) return -1;
  return orient2d_exact(a, b, c);
}

int incircle(const Pt& a, const Pt& b, const Pt& c, const Pt& d) {
  double adx = a.x - d.x;
  double bdx = b.x - d.x;
  double cdx = c.x - d.x;
  double ady = a.y - d.y;
  double bdy = b.y - d.y;
  double cdy = c.y - d.y;

  double bdxcdy = bdx * cdy;
  double cdxbdy = cdx * bdy;
  double alift = adx * adx + ady * ady;

  double cdxady = cdx * ady;
  double adxcdy = adx * cdy;
  double blift = bdx * bdx + bdy * bdy;

  double adxbdy = adx * bdy;
  double bdxady = bdx * ady;
  double clift = cdx * cdx + cdy * cdy;

  double det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) +
               clift * (adxbdy - bdxady);

  double permanent = (std::fabs(bdxcdy) + std::fabs(cdxbdy)) * alift +
                     (std::fabs(cdxady) + std::fabs(adxcdy)) * blift +
                     (std::fabs(adxbdy) + std::fabs(bdxady)) * clift;
  double errbound = kIncircleBound * permanent;
  if (det > errbound) return 1;
  if (-det > errbound) return -1;
  return incircle_exact(a, b, c, d);
}

int incircle_perturbed(const Pt& a, int ra, const Pt& b, int rb, const Pt& c,
                       int rc, const Pt& d, int rd) {
  int s = incircle(a, b, c, d);
  if (s != 0) return s;

  // Cocircular. Perturb the lifted coordinate of point p by -eps^(rank+1):
  // the determinant gains, per row, the cofactor of its lifting entry, and
  // the smallest rank dominates. Row cofactor signs alternate (-,+,-,+).
  struct Term {
    int rank;
    int row;
  };
  std::array<Term, 4> terms = {{{ra, 0}, {rb, 1}, {rc, 2}, {rd, 3}}};
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      if (terms[j].rank < terms[i].rank) std::swap(terms[i], terms[j]);
    }
  }
  for (const Term& t : terms) {
    int o = 0;
    switch (t.row) {
      case 0:
        o = -orient2d(b, c, d);
        break;
      case 1:
        o = orient2d(a, c, d);
        break;
      case 2:
        o = -orient2d(a, b, d);
        break;
      case 3:
        o = orient2d(a, b, c);
        break;
    }
    if (o != 0) return o;
  }
  fail("incircle_perturbed: all four points are collinear");
}

}  // namespace lgw
