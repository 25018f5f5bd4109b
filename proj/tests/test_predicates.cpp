#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "lgw/geometry.hpp"
#include "lgw/predicates.hpp"
#include "lgw/rng.hpp"

using namespace lgw;

namespace {

// Exact rational re-implementations of both determinants. Doubles convert
// to rationals losslessly, so these give the true sign for any input the
// production predicates accept.

using Rat = boost::multiprecision::cpp_rational;

int rsign(const Rat& r) {
  if (r > 0) return 1;
  if (r < 0) return -1;
  return 0;
}

int oracle_orient2d(const Pt& a, const Pt& b, const Pt& c) {
  Rat ax(a.x), ay(a.y), bx(b.x), by(b.y), cx(c.x), cy(c.y);
  return rsign((bx - ax) * (cy - ay) - (by - ay) * (cx - ax));
}

int oracle_incircle(const Pt& a, const Pt& b, const Pt& c, const Pt& d) {
  Rat ax = Rat(a.x) - Rat(d.x), ay = Rat(a.y) - Rat(d.y);
  Rat bx = Rat(b.x) - Rat(d.x), by = Rat(b.y) - Rat(d.y);
  Rat cx = Rat(c.x) - Rat(d.x), cy = Rat(c.y) - Rat(d.y);
  Rat alift = ax * ax + ay * ay;
  Rat blift = bx * bx + by * by;
  Rat clift = cx * cx + cy * cy;
  Rat det = alift * (bx * cy - by * cx) - blift * (ax * cy - ay * cx) +
            clift * (ax * by - ay * bx);
  return rsign(det);
}

Pt random_pt(Rng& rng, double span) {
  return {rng.uniform(-span, span), rng.uniform(-span, span)};
}

}  // namespace

TEST_CASE("orient2d hand cases") {
  CHECK(orient2d({0, 0}, {1, 0}, {0, 1}) == 1);
  CHECK(orient2d({0, 0}, {0, 1}, {1, 0}) == -1);
  CHECK(orient2d({0, 0}, {1, 1}, {2, 2}) == 0);
  CHECK(orient2d({0, 0}, {1, 0}, {2, 0}) == 0);
  CHECK(orient2d({-1, -1}, {1, -1}, {0, 5}) == 1);
}

TEST_CASE("orient2d agrees with the exact oracle on random triples") {
  Rng rng(101);
  for (int trial = 0; trial < 500; ++trial) {
    Pt a = random_pt(rng, 10.0);
    Pt b = random_pt(rng, 10.0);
    Pt c = random_pt(rng, 10.0);
    CHECK(orient2d(a, b, c) == oracle_orient2d(a, b, c));
  }
}

TEST_CASE("orient2d survives near-degenerate inputs") {
  Rng rng(103);
  for (int trial = 0; trial < 300; ++trial) {
    Pt a = random_pt(rng, 1.0);
    Pt b = random_pt(rng, 1.0);
    double t = rng.uniform(-2.0, 2.0);
    Pt c{a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
    c.x += rng.uniform(-1.0, 1.0) * 1e-15;
    CHECK(orient2d(a, b, c) == oracle_orient2d(a, b, c));
  }
}

TEST_CASE("incircle hand cases") {
  Pt a{0, 0}, b{1, 0}, c{1, 1}, d{0, 1};
  SUBCASE("cocircular unit square") { CHECK(incircle(a, b, c, d) == 0); }
  SUBCASE("center is strictly inside") {
    CHECK(incircle(a, b, c, {0.5, 0.5}) == 1);
  }
  SUBCASE("far point is strictly outside") {
    CHECK(incircle(a, b, c, {10, 10}) == -1);
  }
  SUBCASE("reversing the triangle orientation flips the sign") {
    CHECK(incircle(a, c, b, {0.5, 0.5}) == -1);
    CHECK(incircle(a, c, b, {10, 10}) == 1);
  }
}

TEST_CASE("incircle agrees with the exact oracle on random quadruples") {
  Rng rng(105);
  for (int trial = 0; trial < 500; ++trial) {
    Pt a = random_pt(rng, 5.0);
    Pt b = random_pt(rng, 5.0);
    Pt c = random_pt(rng, 5.0);
    Pt d = random_pt(rng, 5.0);
    if (oracle_orient2d(a, b, c) == 0) continue;
    CHECK(incircle(a, b, c, d) == oracle_incircle(a, b, c, d));
  }
}

TEST_CASE("incircle survives nearly-cocircular inputs") {
  Rng rng(107);
  for (int trial = 0; trial < 200; ++trial) {
    double r = rng.uniform(0.5, 2.0);
    double t1 = rng.uniform(0.0, 6.2831853);
    double t2 = rng.uniform(0.0, 6.2831853);
    double t3 = rng.uniform(0.0, 6.2831853);
    double t4 = rng.uniform(0.0, 6.2831853);
    Pt a{r * std::cos(t1), r * std::sin(t1)};
    Pt b{r * std::cos(t2), r * std::sin(t2)};
    Pt c{r * std::cos(t3), r * std::sin(t3)};
    Pt d{r * std::cos(t4) * (1.0 + 1e-15), r * std::sin(t4)};
    if (oracle_orient2d(a, b, c) == 0) continue;
    CHECK(incircle(a, b, c, d) == oracle_incircle(a, b, c, d));
  }
}

TEST_CASE("perturbed incircle resolves cocircular quadruples") {
  Pt a{0, 0}, b{1, 0}, c{1, 1}, d{0, 1};
  int s = incircle_perturbed(a, 0, b, 1, c, 3, d, 2);
  CHECK(s != 0);

  SUBCASE("swapping two triangle vertices flips the sign") {
    CHECK(incircle_perturbed(b, 1, a, 0, c, 3, d, 2) == -s);
  }
  SUBCASE("deterministic across repeat calls") {
    CHECK(incircle_perturbed(a, 0, b, 1, c, 3, d, 2) == s);
  }
}

TEST_CASE("perturbed incircle matches the plain test when it is nonzero") {
  Rng rng(109);
  for (int trial = 0; trial < 300; ++trial) {
    Pt a = random_pt(rng, 3.0);
    Pt b = random_pt(rng, 3.0);
    Pt c = random_pt(rng, 3.0);
    Pt d = random_pt(rng, 3.0);
    if (oracle_orient2d(a, b, c) == 0) continue;
    int plain = incircle(a, b, c, d);
    if (plain == 0) continue;
    CHECK(incircle_perturbed(a, 0, b, 1, c, 2, d, 3) == plain);
  }
}
