#include <cmath>
#include <filesystem>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "sawlab/correction.hpp"
#include "sawlab/enumerate.hpp"

using namespace sawlab;

namespace {

constexpr double kRad = std::numbers::pi / 180.0;

CorrectionConfig small_config(CorrectionKind which, int n, std::uint64_t samples, std::uint64_t seed) {
  CorrectionConfig c;
  c.which = which;
  c.n_steps = n;
  c.n_samples = samples;
  c.stride = 5;
  c.theta_step_deg = 5.0;
  c.n_chains = 4;
  c.batches_per_chain = 10;
  c.seed = seed;
  c.sampling = LSampling::integrated;
  return c;
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("sawlab_test_" + name);
}

}  // namespace

TEST_CASE("success intervals agree with direct line-crossing tests") {
  for (auto kind : {Ensemble::middle_bond_vertical, Ensemble::free}) {
    PivotChain chain(31, {kind}, 17);
    chain.advance(2000);
    Rng rng = make_rng(4);
    for (int w = 0; w < 40; ++w) {
      chain.advance(50);
      const auto pts = chain.points();
      for (double deg : {0.0, 13.0, 45.0, 71.5, 90.0, 120.0, 163.0}) {
        const double th = deg * kRad;
        const LInterval iv = kind == Ensemble::free ? avoidance_interval(pts, th) : midbond_success_interval(pts, th);
        for (int k = 0; k < 25; ++k) {
          const double l = uniform01(rng);
          if (deg == 90.0) continue;  // the vertical case is a limit, checked below
          const auto x = line_crossings(pts, Line(th, {0.0, l}), 1.0);
          if (x.degenerate) continue;
          const bool direct = kind == Ensemble::free
                                  ? x.count == 0
                                  : x.count == 1 && x.bond_indices[0] == int(pts.size() / 2) - 1;
          CHECK(direct == (iv.lo < l && l < iv.hi));
        }
      }
      // theta = 90 is the theta -> 90^- limit.
      const LInterval v = kind == Ensemble::free ? avoidance_interval(pts, 90 * kRad) : midbond_success_interval(pts, 90 * kRad);
      const LInterval near =
          kind == Ensemble::free ? avoidance_interval(pts, 90 * kRad - 1e-7) : midbond_success_interval(pts, 90 * kRad - 1e-7);
      CHECK(v.length() == doctest::Approx(near.length()).epsilon(1e-5));
    }
  }
}

TEST_CASE("Monte Carlo success fractions match exact enumeration") {
  SUBCASE("middle-bond ensemble, N = 5") {
    const auto t = estimate_p2(small_config(CorrectionKind::cut_curve, 5, 200000, 21));
    const auto theta = t.measured_theta_deg();
    for (std::size_t k = 0; k < theta.size(); k += 3) {
      const double exact = exact_midbond_survival_integrated(5, theta[k] * kRad);
      CAPTURE(theta[k]);
      CHECK(std::abs(t.fraction(k) - exact) <= 3 * t.fraction_stderr(k) + 1e-12);
    }
  }
  SUBCASE("free ensemble, N = 7") {
    const auto t = estimate_p1(small_config(CorrectionKind::stopped, 7, 200000, 22));
    const auto theta = t.measured_theta_deg();
    for (std::size_t k = 0; k < theta.size(); k += 3) {
      const double exact = exact_line_survival_integrated(7, theta[k] * kRad);
      CAPTURE(theta[k]);
      CHECK(std::abs(t.fraction(k) - exact) <= 3 * t.fraction_stderr(k) + 1e-12);
    }
  }
  SUBCASE("uniform draws estimate the same mean") {
    auto cfg = small_config(CorrectionKind::cut_curve, 5, 200000, 23);
    cfg.sampling = LSampling::uniform_draw;
    const auto t = estimate_p2(cfg);
    for (std::size_t k : {0u, 9u, 20u}) {
      const double exact = exact_midbond_survival_integrated(5, t.measured_theta_deg()[k] * kRad);
      CHECK(std::abs(t.fraction(k) - exact) <= 3 * t.fraction_stderr(k) + 1e-12);
    }
  }
}

TEST_CASE("correction table structure at N = 101") {
  auto cfg = small_config(CorrectionKind::cut_curve, 101, 20000, 5);
  cfg.stride = 10;
  const auto t = estimate_p2(cfg);
  const auto& rows = t.rows();
  REQUIRE(rows.size() == 19);
  CHECK(rows.front().theta_deg == 0.0);
  CHECK(rows.back().theta_deg == 90.0);
  // l(0) is p^v(0); l(90) = p^h(90) = p^v(180) = p^v(0).
  CHECK(rows.front().l == rows.front().p_v);
  CHECK(rows.back().l == rows.front().l);
  // l(45) = (p^v(45) + p^h(45)) / sqrt 2.
  const auto& mid = rows[9];
  CHECK(mid.l == doctest::Approx((mid.p_v + mid.p_h) / std::sqrt(2.0)));

  // p^v is symmetric about 90 degrees.
  const auto theta = t.measured_theta_deg();
  double worst = 0.0;
  for (std::size_t k = 1; k < theta.size() / 2; ++k) {
    const std::size_t m = theta.size() - k;
    const double z = (t.fraction(k) - t.fraction(m)) / std::hypot(t.fraction_stderr(k), t.fraction_stderr(m));
    worst = std::max(worst, std::abs(z));
  }
  CHECK(worst < 4.5);

  const auto l = assemble_l(t);
  for (double d : {0.0, 12.5, 47.0, 89.0}) CHECK(l(d) == doctest::Approx(l(d + 90.0)).epsilon(1e-14));
  CHECK(l(10.0) == doctest::Approx(rows[2].l));
  const auto ln = assemble_l(t, true);
  CHECK(ln.mean() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("success fraction falls with N") {
  std::vector<double> p, e;
  for (int n : {21, 41, 81}) {
    auto cfg = small_config(CorrectionKind::cut_curve, n, 20000, 8);
    cfg.theta_step_deg = 45.0;
    const auto t = estimate_p2(cfg);
    p.push_back(t.fraction(1));
    e.push_back(t.fraction_stderr(1));
  }
  for (std::size_t k = 1; k < p.size(); ++k) CHECK(p[k - 1] - p[k] > 3 * std::hypot(e[k - 1], e[k]));
}

TEST_CASE("serialization and jackknife") {
  auto cfg = small_config(CorrectionKind::cut_curve, 21, 4000, 3);
  cfg.min_successes = 1000000;
  const auto t = estimate_p2(cfg);
  CHECK(t.has_low_confidence());
  const auto path = temp_path("corr.json");
  t.write_json(path);
  const auto r = CorrectionTable::read_json(path);
  REQUIRE(r.rows().size() == t.rows().size());
  for (std::size_t k = 0; k < t.rows().size(); ++k) {
    CHECK(r.rows()[k].l == t.rows()[k].l);
    CHECK(r.rows()[k].l_stderr == t.rows()[k].l_stderr);
    CHECK(r.rows()[k].n_success == t.rows()[k].n_success);
  }
  CHECK(r.config().seed == t.config().seed);
  CHECK(r.total_samples() == 4000);

  const auto jack = t.without_batch(0);
  CHECK(jack.total_samples() == 4000 - t.batches()[0].n);

  const auto csv = temp_path("corr.csv");
  t.write_csv(csv);
  const auto l = LatticeCorrection::read_csv(csv);
  for (std::size_t k = 0; k < t.rows().size(); ++k) CHECK(l.values()[k] == doctest::Approx(t.rows()[k].l).epsilon(1e-9));
  std::filesystem::remove(path);
  std::filesystem::remove(csv);
}

TEST_CASE("runs are reproducible and thread-count independent") {
  auto cfg = small_config(CorrectionKind::cut_curve, 21, 4000, 12);
  const auto a = estimate_p2(cfg);
  cfg.threads = 3;
  const auto b = estimate_p2(cfg);
  for (std::size_t k = 0; k < a.rows().size(); ++k) CHECK(a.rows()[k].l == b.rows()[k].l);
}

TEST_CASE("lattice correction interpolation") {
  const LatticeCorrection l({0.0, 45.0, 90.0}, {1.0, 2.0, 1.0});
  CHECK(l(22.5) == doctest::Approx(1.5));
  CHECK(l(112.5) == doctest::Approx(1.5));
  CHECK(l(-22.5) == doctest::Approx(1.5));
  CHECK(l.mean() == doctest::Approx(1.5));
  CHECK(LatticeCorrection::flat()(33.0) == 1.0);
  CHECK_THROWS_AS(LatticeCorrection({0.0, 45.0}, {1.0, 2.0}), std::invalid_argument);
  CHECK_THROWS_AS(LatticeCorrection({0.0, 60.0, 50.0, 90.0}, {1, 1, 1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(parse_l_sampling("sometimes"), std::invalid_argument);
}
