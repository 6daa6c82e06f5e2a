#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "sawlab/correction.hpp"

namespace sawlab {

struct ExponentMap {
  double central_charge = 0.0;
  double kappa = 0.0;
  double b = 0.0;        // boundary exponent (6 - kappa) / (2 kappa)
  double b_tilde = 0.0;  // interior exponent b (kappa - 2) / 4
  double dimension = 0.0;  // 1 + kappa / 8
};

/// kappa = (13 - c - sqrt((13 - c)^2 - 144)) / 3 for c <= 1.
ExponentMap exponents_from_charge(double c);

enum class Geometry { disc_center, halfplane_semicircle };

enum class QuadratureRule { gauss_kronrod, tanh_sinh };

/// Normalized boundary density as a function of the polar angle in degrees:
/// disc: l(theta) on [0, 360); semicircle: sin(theta)^(2b) l(theta) on
/// [0, 180]. Without a correction l is constant.
class BoundaryDensity {
 public:
  BoundaryDensity(Geometry geometry, std::optional<LatticeCorrection> correction = std::nullopt,
                  double b = 5.0 / 8.0, QuadratureRule rule = QuadratureRule::gauss_kronrod);

  Geometry geometry() const { return geometry_; }
  double range_lo() const { return 0.0; }
  double range_hi() const { return geometry_ == Geometry::disc_center ? 360.0 : 180.0; }
  double normalization() const { return z_; }

  /// Probability density per degree.
  double density(double theta_deg) const;
  double unnormalized(double theta_deg) const;
  /// P(angle <= theta_deg), by quadrature.
  double cdf(double theta_deg) const;
  /// CDF of the angle reduced modulo `period` (which must divide the range).
  double folded_cdf(double x_deg, double period_deg) const;

 private:
  double integrate(double a, double b) const;

  Geometry geometry_;
  std::optional<LatticeCorrection> correction_;
  double exponent_;  // power of sin(theta) for the semicircle
  QuadratureRule rule_;
  std::vector<double> breaks_;      // segment ends where l has kinks
  std::vector<double> cumulative_;  // unnormalized integral up to each break
  double z_ = 1.0;
};

/// Corrected / uncorrected theory CDFs on a grid.
std::vector<double> density_cdf(const BoundaryDensity& density, std::span<const double> grid,
                                std::optional<double> fold = std::nullopt);

/// Multiplies a density sampled on `grid` by |g'|^b and renormalizes with the
/// trapezoid rule on the same grid.
std::vector<double> conformal_covariance_check(std::span<const double> grid_deg, std::span<const double> base_density,
                                               std::span<const double> gprime, double b);

/// |f'(e^{i theta})| for f(z) = z + 1/z, which maps the upper half-disc onto
/// a half-plane with 0 sent to infinity; equals 2 sin(theta).
double joukowski_gprime(double theta_deg);
/// |h'(e^{i theta})| for the exterior map h(z) = f(-1/z).
double joukowski_exterior_gprime(double theta_deg);

/// (x^-2, x^-5/4): harmonic-measure and SAW half-plane boundary densities.
std::pair<double, double> halfplane_boundary_reference(double x);

}  // namespace sawlab
