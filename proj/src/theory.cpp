#include "sawlab/theory.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace sawlab {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;
// Relative tolerance. Tighter values sit below the roundoff floor of the
// Kronrod error estimate on short segments and force full-depth recursion;
// segments shorter than kTinySegment use the midpoint rule instead.
constexpr double kQuadTol = 1e-12;
constexpr unsigned kQuadDepth = 15;
constexpr double kTinySegment = 1e-6;  // degrees

}  // namespace

ExponentMap exponents_from_charge(double c) {
  if (!(c <= 1.0)) throw std::invalid_argument("central charge must satisfy c <= 1");
  const long double a = 13.0L - c;
  const long double disc = std::max(0.0L, a * a - 144.0L);
  const long double kappa = (a - std::sqrt(disc)) / 3.0L;
  // (6 - kappa) / (2 kappa) written as 3/kappa - 1/2 keeps 5/8 exact at kappa = 8/3.
  const long double b = 3.0L / kappa - 0.5L;
  ExponentMap m;
  m.central_charge = c;
  m.kappa = static_cast<double>(kappa);
  m.b = static_cast<double>(b);
  m.b_tilde = static_cast<double>(b * (kappa - 2.0L) / 4.0L);
  m.dimension = static_cast<double>(1.0L + kappa / 8.0L);
  return m;
}

BoundaryDensity::BoundaryDensity(Geometry geometry, std::optional<LatticeCorrection> correction, double b,
                                 QuadratureRule rule)
    : geometry_(geometry), correction_(std::move(correction)), exponent_(2 * b), rule_(rule) {
  const double hi = range_hi();
  const std::vector<double> nodes = correction_ ? correction_->theta_deg() : std::vector<double>{0.0, 90.0};
  for (double base = 0.0; base < hi; base += 90.0) {
    for (double t : nodes) {
      if (base + t <= hi) breaks_.push_back(base + t);
    }
  }
  breaks_.push_back(hi);
  std::sort(breaks_.begin(), breaks_.end());
  breaks_.erase(std::unique(breaks_.begin(), breaks_.end(), [](double x, double y) { return std::abs(x - y) < 1e-12; }),
                breaks_.end());
  cumulative_.assign(breaks_.size(), 0.0);
  for (std::size_t k = 1; k < breaks_.size(); ++k) cumulative_[k] = cumulative_[k - 1] + integrate(breaks_[k - 1], breaks_[k]);
  z_ = cumulative_.back();
  if (!(z_ > 0)) throw std::invalid_argument("density does not normalize");
}

double BoundaryDensity::unnormalized(double theta_deg) const {
  const double l = correction_ ? (*correction_)(theta_deg) : 1.0;
  if (geometry_ == Geometry::disc_center) return l;
  // Reflect into [0, 90] so both endpoints give exactly zero.
  const double s = std::sin(std::min(theta_deg, 180.0 - theta_deg) * kDeg);
  return s > 0 ? std::pow(s, exponent_) * l : 0.0;
}

double BoundaryDensity::density(double theta_deg) const {
  if (theta_deg < range_lo() || theta_deg > range_hi()) return 0.0;
  return unnormalized(theta_deg) / z_;
}

double BoundaryDensity::integrate(double a, double b) const {
  if (b <= a) return 0.0;
  if (b - a < kTinySegment) return (b - a) * unnormalized(0.5 * (a + b));
  auto f = [this](double t) { return unnormalized(t); };
  if (rule_ == QuadratureRule::gauss_kronrod) {
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, kQuadDepth, kQuadTol);
  }
  thread_local boost::math::quadrature::tanh_sinh<double> ts;
  return ts.integrate(f, a, b, kQuadTol);
}

double BoundaryDensity::cdf(double theta_deg) const {
  if (theta_deg <= range_lo()) return 0.0;
  if (theta_deg >= range_hi()) return 1.0;
  const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), theta_deg);
  const auto k = static_cast<std::size_t>(it - breaks_.begin()) - 1;
  return (cumulative_[k] + integrate(breaks_[k], theta_deg)) / z_;
}

double BoundaryDensity::folded_cdf(double x_deg, double period_deg) const {
  const double span = range_hi() - range_lo();
  const double copies = span / period_deg;
  if (std::abs(copies - std::round(copies)) > 1e-9) throw std::invalid_argument("fold period must divide the range");
  if (x_deg <= 0) return 0.0;
  if (x_deg >= period_deg) return 1.0;
  double total = 0.0;
  for (int k = 0; k < int(std::lround(copies)); ++k) total += cdf(k * period_deg + x_deg) - cdf(k * period_deg);
  return total;
}

std::vector<double> density_cdf(const BoundaryDensity& density, std::span<const double> grid, std::optional<double> fold) {
  std::vector<double> out(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) out[k] = fold ? density.folded_cdf(grid[k], *fold) : density.cdf(grid[k]);
  return out;
}

std::vector<double> conformal_covariance_check(std::span<const double> grid_deg, std::span<const double> base_density,
                                               std::span<const double> gprime, double b) {
  if (grid_deg.size() != base_density.size() || grid_deg.size() != gprime.size() || grid_deg.size() < 2) {
    throw std::invalid_argument("conformal check needs matching grids");
  }
  std::vector<double> out(grid_deg.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    if (!(gprime[k] > 0)) throw std::invalid_argument("|g'| must be positive on the boundary grid");
    out[k] = std::pow(gprime[k], b) * base_density[k];
  }
  double area = 0.0;
  for (std::size_t k = 1; k < out.size(); ++k) area += 0.5 * (out[k] + out[k - 1]) * (grid_deg[k] - grid_deg[k - 1]);
  for (double& v : out) v /= area;
  return out;
}

double joukowski_gprime(double theta_deg) {
  const std::complex<double> z = std::polar(1.0, theta_deg * kDeg);
  return std::abs(1.0 - 1.0 / (z * z));
}

double joukowski_exterior_gprime(double theta_deg) {
  // h(z) = f(-1/z) = -(z + 1/z); h'(z) = -(1 - 1/z^2).
  const std::complex<double> z = std::polar(1.0, theta_deg * kDeg);
  const std::complex<double> w = -1.0 / z;
  return std::abs((1.0 - 1.0 / (w * w)) / (z * z));
}

std::pair<double, double> halfplane_boundary_reference(double x) {
  if (!(x > 0)) throw std::invalid_argument("boundary coordinate must be positive");
  return {1.0 / (x * x), std::pow(x, -1.25)};
}

}  // namespace sawlab
