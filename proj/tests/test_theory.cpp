#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "sawlab/theory.hpp"

using namespace sawlab;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

// Composite Simpson on [a, b] with m (even) panels.
template <class F>
double simpson(F f, double a, double b, int m) {
  const double h = (b - a) / m;
  double s = f(a) + f(b);
  for (int k = 1; k < m; ++k) s += (k % 2 ? 4.0 : 2.0) * f(a + k * h);
  return s * h / 3.0;
}

LatticeCorrection bumpy_correction() {
  std::vector<double> t, v;
  for (int k = 0; k <= 90; ++k) {
    t.push_back(k);
    v.push_back(1.0 + 0.15 * std::cos(4 * k * kDeg) + 0.03 * std::sin(2 * k * kDeg) * std::sin(2 * k * kDeg));
  }
  return LatticeCorrection(t, v);
}

}  // namespace

TEST_CASE("exponent map") {
  const auto saw = exponents_from_charge(0.0);
  CHECK(saw.kappa == 8.0 / 3.0);
  CHECK(saw.b == 5.0 / 8.0);
  CHECK(saw.b_tilde == 5.0 / 48.0);
  CHECK(saw.dimension == doctest::Approx(4.0 / 3.0));
  CHECK(exponents_from_charge(-2.0).kappa == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(exponents_from_charge(-2.0).b_tilde == doctest::Approx(0.0));
  CHECK(exponents_from_charge(1.0).kappa == doctest::Approx(4.0).epsilon(1e-15));
  CHECK_THROWS_AS(exponents_from_charge(1.5), std::invalid_argument);
  double prev = 0.0;
  for (double c = -40.0; c <= 1.0; c += 0.25) {
    const double k = exponents_from_charge(c).kappa;
    CHECK(k > prev);
    CHECK(k <= 4.0 + 1e-15);
    prev = k;
  }
}

TEST_CASE("disc density is uniform without a correction") {
  const BoundaryDensity disc(Geometry::disc_center);
  CHECK(disc.density(17.0) == doctest::Approx(1.0 / 360.0));
  CHECK(disc.cdf(90.0) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(disc.folded_cdf(30.0, 90.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("semicircle density") {
  const BoundaryDensity semi(Geometry::halfplane_semicircle);
  CHECK(semi.density(90.0) / semi.density(30.0) == doctest::Approx(std::pow(2.0, 1.25)).epsilon(1e-13));
  CHECK(std::abs(semi.cdf(90.0) - 0.5) < 1e-10);
  for (double t = 0.0; t < 180.0; t += 7.0) CHECK(semi.density(t) <= semi.density(90.0));
  // Normalization against Simpson on the unnormalized density.
  const double z = simpson([&](double t) { return semi.unnormalized(t); }, 0.0, 180.0, 20000);
  CHECK(semi.normalization() == doctest::Approx(z).epsilon(1e-8));
  // Total exponent 2b is the product of the two interior factors sin^b.
  const double zz = simpson([](double t) { return std::pow(std::sin(t * kDeg), 0.625) * std::pow(std::sin(t * kDeg), 0.625); },
                            0.0, 60.0, 20000);
  CHECK(semi.cdf(60.0) == doctest::Approx(zz / z).epsilon(1e-7));
}

TEST_CASE("two quadrature rules agree everywhere") {
  for (auto geom : {Geometry::disc_center, Geometry::halfplane_semicircle}) {
    for (bool corrected : {false, true}) {
      std::optional<LatticeCorrection> l;
      if (corrected) l = bumpy_correction();
      const BoundaryDensity gk(geom, l, 5.0 / 8.0, QuadratureRule::gauss_kronrod);
      const BoundaryDensity ts(geom, l, 5.0 / 8.0, QuadratureRule::tanh_sinh);
      double worst = 0.0;
      double prev = 0.0;
      for (double t = 0.0; t <= gk.range_hi(); t += 0.25) {
        const double a = gk.cdf(t);
        worst = std::max(worst, std::abs(a - ts.cdf(t)));
        CHECK(a - prev >= -1e-12);
        prev = a;
      }
      CHECK(worst <= 1e-8);
      CHECK(gk.cdf(gk.range_hi()) == 1.0);
      CHECK(gk.cdf(0.0) == 0.0);
    }
  }
}

TEST_CASE("flat correction leaves the CDF unchanged") {
  const BoundaryDensity plain(Geometry::halfplane_semicircle);
  const BoundaryDensity flat(Geometry::halfplane_semicircle, LatticeCorrection::flat());
  for (double t = 0.0; t <= 180.0; t += 5.0) CHECK(std::abs(plain.cdf(t) - flat.cdf(t)) < 1e-12);
}

TEST_CASE("corrected disc CDF against an independent Simpson oracle") {
  const auto l = bumpy_correction();
  const BoundaryDensity disc(Geometry::disc_center, l);
  // Period 90 means the disc normalization is 4 times one period.
  const double period = simpson([&](double t) { return l(t); }, 0.0, 90.0, 90 * 200);
  CHECK(disc.normalization() == doctest::Approx(4 * period).epsilon(1e-8));
  for (double t : {10.25, 44.0, 45.0, 123.5, 300.0}) {
    const double num = simpson([&](double s) { return l(s); }, 0.0, t, 40000);
    CHECK(disc.cdf(t) == doctest::Approx(num / (4 * period)).epsilon(1e-6));
  }
  // Folding modulo 90 gives back one period of the same density.
  CHECK(disc.folded_cdf(45.0, 90.0) == doctest::Approx(4 * disc.cdf(45.0)).epsilon(1e-12));
  CHECK_THROWS_AS(disc.folded_cdf(10.0, 70.0), std::invalid_argument);
}

TEST_CASE("conformal covariance from the Joukowski map") {
  std::vector<double> grid, flat, gp, gp_ext;
  for (int k = 1; k < 1800; ++k) {
    grid.push_back(k * 0.1);
    flat.push_back(1.0);
    gp.push_back(joukowski_gprime(k * 0.1));
    gp_ext.push_back(joukowski_exterior_gprime(k * 0.1));
  }
  SUBCASE("|f'| = 2 sin") {
    for (std::size_t k = 0; k < grid.size(); k += 37) CHECK(gp[k] == doctest::Approx(2 * std::sin(grid[k] * kDeg)));
  }
  SUBCASE("interior density is sin^(5/8)") {
    const auto d = conformal_covariance_check(grid, flat, gp, 5.0 / 8.0);
    const double ratio0 = d[0] / std::pow(std::sin(grid[0] * kDeg), 0.625);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      CHECK(d[k] / std::pow(std::sin(grid[k] * kDeg), 0.625) == doctest::Approx(ratio0).epsilon(1e-12));
    }
  }
  SUBCASE("exterior equals interior") {
    const auto in = conformal_covariance_check(grid, flat, gp, 5.0 / 8.0);
    const auto out = conformal_covariance_check(grid, flat, gp_ext, 5.0 / 8.0);
    for (std::size_t k = 0; k < grid.size(); ++k) CHECK(out[k] == doctest::Approx(in[k]).epsilon(1e-12));
  }
  SUBCASE("identity map keeps the density") {
    std::vector<double> base, ones(grid.size(), 1.0);
    for (double t : grid) base.push_back(std::sin(t * kDeg));
    const auto d = conformal_covariance_check(grid, base, ones, 5.0 / 8.0);
    for (std::size_t k = 0; k < grid.size(); ++k) CHECK(d[k] / base[k] == doctest::Approx(d[0] / base[0]));
  }
  SUBCASE("non-positive derivative rejected") {
    std::vector<double> bad = gp;
    bad[3] = 0.0;
    CHECK_THROWS_AS(conformal_covariance_check(grid, flat, bad, 0.625), std::invalid_argument);
  }
}

TEST_CASE("half-plane reference curves") {
  CHECK(halfplane_boundary_reference(1.0).first == 1.0);
  CHECK(halfplane_boundary_reference(1.0).second == 1.0);
  CHECK(halfplane_boundary_reference(4.0).first == doctest::Approx(1.0 / 16.0));
  CHECK(halfplane_boundary_reference(4.0).second == doctest::Approx(0.17677669529663687));
  for (double x : {0.3, 1.7, 25.0}) {
    CHECK(halfplane_boundary_reference(2 * x).second / halfplane_boundary_reference(x).second ==
          doctest::Approx(std::pow(2.0, -1.25)));
  }
  CHECK_THROWS_AS(halfplane_boundary_reference(0.0), std::invalid_argument);
}
