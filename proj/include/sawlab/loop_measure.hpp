#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "sawlab/lattice.hpp"
#include "sawlab/rng.hpp"

namespace sawlab {

/// Finite set of interior lattice sites; the boundary is the set of exterior
/// nearest neighbours.
class FiniteDomain {
 public:
  /// `require_connected` enforces a connected interior (subdomains obtained
  /// by removing a walk need not be connected).
  explicit FiniteDomain(std::vector<Point> sites, bool require_connected = true);

  /// Sites x0 <= x < x0 + w, y0 <= y < y0 + h.
  static FiniteDomain rectangle(int w, int h, int x0, int y0);
  /// w x h block containing the origin at its centre (lower-left centre for
  /// even sides).
  static FiniteDomain centered_rectangle(int w, int h);
  /// Sites with |p| < radius.
  static FiniteDomain disc(double radius);
  /// Sites with r_in <= |p| < r_out.
  static FiniteDomain annulus(double r_in, double r_out);
  /// Parses "WxH" (centred) or "WxH@X,Y" (lower-left corner at X,Y).
  static FiniteDomain parse(const std::string& text);

  std::size_t size() const { return sites_.size(); }
  const std::vector<Point>& sites() const { return sites_; }
  bool contains(Point p) const { return index_.contains(p); }
  /// Index of an interior site, -1 when outside.
  int index_of(Point p) const;

  /// Exterior neighbours, each listed once.
  std::vector<Point> boundary() const;
  /// (interior y, exterior z) nearest-neighbour pairs, sorted.
  std::vector<std::pair<Point, Point>> boundary_edges() const;
  /// Interior nearest-neighbour index lists.
  std::vector<std::vector<int>> neighbours() const;

  FiniteDomain without(std::span<const Point> removed) const;
  FiniteDomain united(const FiniteDomain& other) const;

 private:
  std::vector<Point> sites_;
  std::unordered_map<Point, int, PointHash> index_;
};

struct LoopMeasureValue {
  double value = 0.0;
  std::string method;   // "determinant" or "truncated"
  int max_length = 0;   // truncation length L
  double tail_bound = 0.0;  // upper bound on the omitted loops
};

/// Rooted random-walk loop measure of loops in A: sum_n tr(P_A^n) / n =
/// -log det(I - P_A), P_A the 1/4 step matrix killed off A.
LoopMeasureValue loop_measure_in_domain(const FiniteDomain& domain);

/// Same sum over loop lengths n <= L from exact closed-walk counts, with the
/// bound |A| rho^(L+1) / ((L+1)(1-rho)) on the rest (rho the spectral radius).
LoopMeasureValue loop_measure_truncated(const FiniteDomain& domain, int max_length);

/// Spectral radius of P_A.
double killed_spectral_radius(const FiniteDomain& domain);

/// Green's function G = (I - P_A)^-1.
std::vector<double> green_matrix(const FiniteDomain& domain);

/// m_D(omega): measure of loops in D meeting the interior sites of omega.
double loop_weight_of_walk(const FiniteDomain& domain, std::span<const Point> walk);

/// Same quantity as sum_j log G_{D_j}(w_j, w_j) with D_j = D minus the
/// earlier sites (telescoped determinants).
double loop_weight_telescoped(const FiniteDomain& domain, std::span<const Point> walk);

using ExitEdge = std::pair<Point, Point>;  // last interior site, first exterior site

struct ExitEdgeLess {
  bool operator()(const ExitEdge& a, const ExitEdge& b) const;
};

using EdgeWeights = std::map<ExitEdge, double, ExitEdgeLess>;

struct LambdaPartition {
  double total = 0.0;
  EdgeWeights by_edge;
  std::uint64_t n_walks = 0;
};

/// Sums q(omega) = beta^|omega| exp(-(c/2) m_D(omega)) over SAWs from the
/// origin whose last step is the first to leave D, resolved by exit edge.
LambdaPartition lambda_partition_function(const FiniteDomain& domain, double c, double beta,
                                          std::size_t max_sites = 30);

/// Random-walk exit law from the origin: G(0, y) / 4 per exit edge (y, z).
EdgeWeights poisson_kernel(const FiniteDomain& domain);

/// Chronological loop erasure.
std::vector<Point> loop_erase(std::span<const Point> path);

/// Simple random walk from the origin until it first leaves the domain.
std::vector<Point> random_walk_to_exit(const FiniteDomain& domain, Rng& rng);

/// Empirical exit-edge law of loop-erased walks.
EdgeWeights lerw_endpoint_law(const FiniteDomain& domain, std::uint64_t samples, std::uint64_t seed);

struct CutcurveWeights {
  double q1 = 0.0;  // loops in the whole truncated region D u D*
  double q2 = 0.0;  // loops in D meeting the inner part plus loops in D* meeting the outer part
  int crossing_bond = -1;
};

/// Weights of a walk from the origin that leaves D through exactly one bond.
CutcurveWeights cutcurve_weights(const FiniteDomain& inner, const FiniteDomain& outer, std::span<const Point> walk,
                                 double c, double beta);

}  // namespace sawlab
