#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>

#include "doctest.h"
#include "sawlab/lattice.hpp"
#include "support.hpp"

using namespace sawlab;

namespace {

constexpr double kPi = std::numbers::pi;

// Exact side of lattice point p relative to the line through (0, num/den) with
// integer direction (dx, dy): sign of dx (y - l) - dy x, scaled by den.
int exact_side(Point p, std::int64_t dx, std::int64_t dy, std::int64_t num, std::int64_t den) {
  const std::int64_t v = dx * (den * p.y - num) - dy * den * p.x;
  return (v > 0) - (v < 0);
}

}  // namespace

TEST_CASE("is_self_avoiding: basic cases") {
  CHECK(is_self_avoiding(std::vector<Point>{{0, 0}, {1, 0}, {1, 1}}));
  CHECK_FALSE(is_self_avoiding(std::vector<Point>{{0, 0}, {1, 0}, {0, 0}}));
  CHECK_FALSE(is_self_avoiding(std::vector<Point>{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0, 0}}));
  CHECK_THROWS_AS(is_self_avoiding(std::vector<Point>{{0, 0}, {2, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(is_self_avoiding(std::vector<Point>{{0, 0}, {1, 1}}), std::invalid_argument);
}

TEST_CASE("Walk validates its sites") {
  CHECK_THROWS(Walk(std::vector<Point>{{0, 0}, {1, 0}, {0, 0}}));
  CHECK_THROWS(Walk(std::vector<Point>{{0, 0}, {1, 0}}, 0.0));
  const Walk rod = Walk::straight_rod(5, {0, 1});
  CHECK(rod.steps() == 5);
  CHECK(rod.context().n_steps == 5);
  CHECK(rod.bond(2).orientation() == Orientation::vertical);
}

TEST_CASE("point group is closed and every element maps Z^2 onto itself") {
  std::set<int> indices;
  for (int a = 0; a < 8; ++a) {
    const Symmetry s = Symmetry::from_index(a);
    CHECK((s * s.inverse()).is_identity());
    CHECK(std::abs(s.a() * s.d() - s.b() * s.c()) == 1);
    for (int b = 0; b < 8; ++b) indices.insert((s * Symmetry::from_index(b)).index());
  }
  CHECK(indices.size() == 8);
  // Composition convention: (s*t)(p) == s(t(p)).
  const Symmetry r = Symmetry::rotation90();
  const Symmetry f = Symmetry::from_index(4);
  const Point p{2, 1};
  CHECK((r * f).apply(p) == r.apply(f.apply(p)));
  CHECK(r.apply(Point{1, 0}) == Point{0, 1});
}

TEST_CASE("Line canonicalizes its angle modulo pi") {
  const Line a(kPi + 0.3, {0.0, 0.5});
  CHECK(a.theta() == doctest::Approx(0.3));
  const Line b(-0.3, {0.0, 0.5});
  CHECK(b.theta() == doctest::Approx(kPi - 0.3));
  CHECK_THROWS(Line(0.0, {0.0, std::nan("")}));
}

TEST_CASE("segment_crosses_line examples") {
  const Line horizontal(0.0, {0.0, 0.5});
  CHECK(segment_crosses_line({{0, 0}, {0, 1}}, horizontal, 1.0).crosses);
  CHECK_FALSE(segment_crosses_line({{5, 0}, {6, 0}}, horizontal, 1.0).crosses);

  // y = x + 1/4 leaves both (0,0) and (1,0) strictly below: exact sides are
  // -1 and -1 (direction (1,1), l = 1/4).
  CHECK(exact_side({0, 0}, 1, 1, 1, 4) == -1);
  CHECK(exact_side({1, 0}, 1, 1, 1, 4) == -1);
  CHECK_FALSE(segment_crosses_line({{0, 0}, {1, 0}}, Line(kPi / 4, {0.0, 0.25}), 1.0).crosses);
  // The line of slope -1 through the same point separates them.
  CHECK(exact_side({0, 0}, -1, 1, 1, 4) == 1);
  CHECK(exact_side({1, 0}, -1, 1, 1, 4) == -1);
  CHECK(segment_crosses_line({{0, 0}, {1, 0}}, Line(3 * kPi / 4, {0.0, 0.25}), 1.0).crosses);
}

TEST_CASE("touching endpoints are flagged, and the limit rule resolves them") {
  const Line vertical(kPi / 2, {0.0, 0.3});
  const auto t = segment_crosses_line({{0, 1}, {0, 2}}, vertical, 1.0);
  CHECK(t.degenerate);
  // Rotating the line slightly clockwise leaves (0,1) and (0,2) on one side.
  const auto lim = segment_crosses_line({{0, 1}, {0, 2}}, vertical, 1.0, TouchRule::limit_below);
  CHECK_FALSE(lim.degenerate);
  CHECK_FALSE(lim.crosses);
  const auto mid = segment_crosses_line({{0, 0}, {0, 1}}, vertical, 1.0, TouchRule::limit_below);
  CHECK(mid.crosses);
}

TEST_CASE("walk_line_crossings examples") {
  const Walk rod = Walk::straight_rod(5, {0, 1});
  const auto c = walk_line_crossings(rod, Line(0.0, {0.0, 2.5}));
  CHECK(c.count == 1);
  REQUIRE(c.bond_indices.size() == 1);
  CHECK(c.bond_indices[0] == 2);

  const Walk u(std::vector<Point>{{0, 0}, {0, 1}, {0, 2}, {1, 2}, {1, 1}, {1, 0}});
  CHECK(walk_line_crossings(u, Line(0.0, {0.0, 1.5})).count == 2);
}

TEST_CASE("walk_line_crossings equals a per-bond brute force on random walks") {
  Rng rng = make_rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const Walk w(testing::grow_random_saw(rng, 100));
    const Line line(kPi * uniform01(rng), {20 * uniform01(rng) - 10, 20 * uniform01(rng) - 10});
    const auto c = walk_line_crossings(w, line);
    int brute = 0;
    std::vector<int> idx;
    for (int b = 0; b < w.steps(); ++b) {
      const Point p = w.points()[static_cast<std::size_t>(b)];
      const Point q = w.points()[static_cast<std::size_t>(b) + 1];
      const double sp = line.signed_distance({double(p.x), double(p.y)});
      const double sq = line.signed_distance({double(q.x), double(q.y)});
      if (sp * sq <= 0.0) {
        ++brute;
        idx.push_back(b);
      }
    }
    CHECK_FALSE(c.degenerate);
    CHECK(c.count == brute);
    CHECK(c.bond_indices == idx);
  }
}

TEST_CASE("segment_crosses_line agrees with exact rational arithmetic") {
  Rng rng = make_rng(11);
  int disagreements = 0;
  int flagged = 0;
  for (int trial = 0; trial < 1'000'000; ++trial) {
    const auto dx = static_cast<std::int64_t>(uniform_index(rng, 9)) - 4;
    const auto dy = static_cast<std::int64_t>(uniform_index(rng, 9)) - 4;
    if (dx == 0 && dy == 0) continue;
    const auto den = static_cast<std::int64_t>(1 + uniform_index(rng, 16));
    const auto num = static_cast<std::int64_t>(uniform_index(rng, 64)) - 32;
    const Point a{static_cast<int>(uniform_index(rng, 21)) - 10, static_cast<int>(uniform_index(rng, 21)) - 10};
    const Point b = a + (uniform_index(rng, 2) ? Point{1, 0} : Point{0, 1});
    const Line line(std::atan2(double(dy), double(dx)), {0.0, double(num) / double(den)});
    const auto t = segment_crosses_line({a, b}, line, 1.0);
    const int sa = exact_side(a, dx, dy, num, den);
    const int sb = exact_side(b, dx, dy, num, den);
    const bool exact_touch = sa == 0 || sb == 0;
    if (t.degenerate) {
      ++flagged;
      if (!exact_touch) ++disagreements;
      continue;
    }
    if (exact_touch || (sa != sb) != t.crosses) ++disagreements;
  }
  CHECK(disagreements == 0);
  CHECK(flagged > 0);
}

TEST_CASE("crossing counts are invariant under the point group") {
  Rng rng = make_rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const Walk w(testing::grow_random_saw(rng, 60));
    const Line line(kPi * uniform01(rng), {10 * uniform01(rng) - 5, 10 * uniform01(rng) - 5});
    const int base = walk_line_crossings(w, line).count;
    for (int k = 0; k < 8; ++k) {
      const Symmetry s = Symmetry::from_index(k);
      const Walk ws = w.transformed(s);
      CHECK(is_self_avoiding(ws.points()));
      CHECK(walk_line_crossings(ws, line.transformed(s)).count == base);
    }
  }
}

TEST_CASE("crossing parity follows the endpoint sides") {
  Rng rng = make_rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    const Walk w(testing::grow_random_saw(rng, 80));
    const Line line(kPi * uniform01(rng), {8 * uniform01(rng) - 4, 8 * uniform01(rng) - 4});
    const auto c = walk_line_crossings(w, line);
    const Point p = w.points().front();
    const Point q = w.points().back();
    const bool opposite = (line.signed_distance({double(p.x), double(p.y)}) > 0) !=
                          (line.signed_distance({double(q.x), double(q.y)}) > 0);
    CHECK((c.count % 2 == 1) == opposite);
  }
}

TEST_CASE("physical spacing scales the geometry") {
  const Walk rod = Walk::straight_rod(10, {0, 1}, 0.1);
  CHECK(walk_line_crossings(rod, Line(0.0, {0.0, 0.55})).count == 1);
  CHECK(walk_line_crossings(rod, Line(0.0, {0.0, 1.05})).count == 0);
}
