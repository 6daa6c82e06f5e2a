#include <array>
#include <atomic>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "sawlab/enumerate.hpp"

using namespace sawlab;

TEST_CASE("small counts") {
  CHECK(enumerate_saws(1, nullptr).count == 4);
  CHECK(enumerate_saws(2, nullptr).count == 12);
  CHECK(enumerate_saws(3, nullptr).count == 36);
  CHECK(enumerate_saws(4, nullptr).count == 100);
  CHECK(count_saws_reduced(4) == 100);
}

TEST_CASE("naive and symmetry-reduced searches agree up to N = 12") {
  for (int n = 1; n <= 12; ++n) {
    CAPTURE(n);
    CHECK(enumerate_saws(n, nullptr).count == count_saws_reduced(n));
  }
}

TEST_CASE("counts are increasing and submultiplicative") {
  std::array<std::uint64_t, 13> c{};
  for (int n = 0; n <= 12; ++n) c[static_cast<std::size_t>(n)] = count_saws_reduced(n);
  for (std::size_t n = 1; n <= 12; ++n) {
    CHECK(c[n] > c[n - 1]);
    CHECK(c[n] <= 4 * static_cast<std::uint64_t>(std::pow(3.0, double(n - 1))));
  }
  for (std::size_t n = 1; n <= 6; ++n) {
    for (std::size_t m = 1; n + m <= 12; ++m) CHECK(c[n + m] <= c[n] * c[m]);
  }
}

TEST_CASE("visitor sees every walk once, also with parallel branches") {
  std::atomic<std::uint64_t> seen{0};
  const auto r = enumerate_saws(7, [&](std::span<const Point> pts) {
    CHECK(pts.size() == 8);
    seen.fetch_add(1, std::memory_order_relaxed);
  }, {kDefaultEnumerationCap, 4});
  CHECK(r.count == 2172);
  CHECK(seen.load() == 2172);
}

TEST_CASE("cap refusal carries a cost estimate") {
  try {
    enumerate_saws(13, nullptr, {12, 1});
    FAIL("expected refusal");
  } catch (const EnumerationCapExceeded& e) {
    CHECK(e.estimated_walks() == doctest::Approx(881500.0).epsilon(0.1));
  }
  CHECK_THROWS_AS(count_saws_reduced(20), EnumerationCapExceeded);
}

TEST_CASE("middle-bond counts equal half the free counts") {
  for (int n = 1; n <= 9; n += 2) {
    CAPTURE(n);
    CHECK(count_midbond_walks(n) * 2 == count_saws_reduced(n));
  }
  CHECK(enumerate_midbond_walks(5).size() == 71);
}

TEST_CASE("connective-constant estimates") {
  CHECK(kHexagonalMu == doctest::Approx(1.8477590650225735).epsilon(1e-15));
  const std::array<double, 4> counts{4, 12, 36, 100};
  const auto est = estimate_mu(counts);
  REQUIRE(est.ratios.size() == 3);
  CHECK(est.ratios[0] == 3.0);
  CHECK(est.ratios[1] == 3.0);
  CHECK(est.ratios[2] == doctest::Approx(100.0 / 36.0));
  CHECK(est.roots[0] == 4.0);

  std::array<double, 6> geometric{};
  for (std::size_t k = 0; k < geometric.size(); ++k) geometric[k] = std::pow(2.5, double(k + 1));
  const auto g = estimate_mu(geometric);
  for (double r : g.ratios) CHECK(r == doctest::Approx(2.5).epsilon(1e-14));
  for (double r : g.roots) CHECK(r == doctest::Approx(2.5).epsilon(1e-14));
  CHECK_THROWS(estimate_mu(std::span<const double>(counts.data(), 1)));
}

TEST_CASE("exact line survival") {
  const std::array<double, 1> half{0.5};
  const auto t1 = exact_line_survival(1, 0.0, half);
  REQUIRE(t1.rows.size() == 1);
  CHECK(t1.rows[0].survivors == 3);
  CHECK(t1.rows[0].total == 4);

  // A line through the origin touches a site and is excluded.
  const std::array<double, 2> grid{0.0, 0.5};
  const auto t2 = exact_line_survival(3, 0.0, grid);
  CHECK(t2.excluded_l.size() == 1);
  CHECK(t2.rows.size() == 1);

  // Lines beyond the reachable diamond never meet a walk.
  const std::array<double, 1> far{6.5};
  const auto t3 = exact_line_survival(6, 0.3, far);
  CHECK(t3.rows[0].survivors == t3.rows[0].total);
  for (double l : {0.25, 0.5, 0.75}) {
    const std::array<double, 1> one{l};
    const auto t = exact_line_survival(5, 0.7, one);
    CHECK(t.rows[0].survivors <= t.rows[0].total);
  }
}

TEST_CASE("vertical lines match horizontal ones with the axes swapped") {
  for (double l : {0.2, 0.5, 0.9}) {
    const Line horizontal(0.0, {0.0, l});
    const Line vertical(std::numbers::pi / 2, {l, 0.0});
    std::uint64_t a = 0;
    std::uint64_t b = 0;
    enumerate_saws(5, [&](std::span<const Point> pts) {
      a += line_crossings(pts, horizontal, 1.0).count == 0;
      b += line_crossings(pts, vertical, 1.0).count == 0;
    });
    CHECK(a == b);
  }
}

TEST_CASE("integrated survival matches a fine l grid") {
  // Survival is piecewise constant in l, so a midpoint grid converges to the
  // exact integral at rate 1 / grid size.
  for (double theta : {0.0, 0.4, 1.1, 2.5}) {
    CAPTURE(theta);
    const int m = 2000;
    std::vector<double> grid;
    for (int k = 0; k < m; ++k) grid.push_back((k + 0.5) / m);
    const auto t = exact_line_survival(5, theta, grid);
    double sum = 0.0;
    for (const auto& row : t.rows) sum += row.fraction();
    const double grid_mean = sum / static_cast<double>(t.rows.size());
    CHECK(exact_line_survival_integrated(5, theta) == doctest::Approx(grid_mean).epsilon(5e-3));
  }
  // At theta = 0 a walk survives iff it never goes above y = 0.
  std::uint64_t low = 0;
  const auto total = enumerate_saws(6, [&](std::span<const Point> pts) {
    bool ok = true;
    for (Point p : pts) ok = ok && p.y <= 0;
    low += ok;
  }).count;
  CHECK(exact_line_survival_integrated(6, 0.0) == doctest::Approx(double(low) / double(total)));
}

TEST_CASE("middle-bond survival is symmetric about 90 degrees") {
  for (double deg : {10.0, 30.0, 60.0, 85.0}) {
    const double a = deg * std::numbers::pi / 180;
    CHECK(exact_midbond_survival_integrated(5, a) ==
          doctest::Approx(exact_midbond_survival_integrated(5, std::numbers::pi - a)).epsilon(1e-12));
  }
  const double s0 = exact_midbond_survival_integrated(5, 0.0);
  CHECK(s0 > 0.0);
  CHECK(s0 < 1.0);
}
