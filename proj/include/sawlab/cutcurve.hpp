#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sawlab/lattice.hpp"
#include "sawlab/pivot.hpp"
#include "sawlab/saw_tree.hpp"

namespace sawlab {

enum class CurveKind { circle, semicircle_upper };

/// Circle (or its upper half) of radius R centred at the origin, in physical
/// units.
struct CutCurve {
  CurveKind kind = CurveKind::circle;
  double radius = 0.2;
};

std::string_view to_string(CurveKind k);

struct CurveCrossing {
  Vec2 point;  // lattice units
  double angle_deg = 0.0;  // polar angle in [0, 360)
  int bond = 0;
  Orientation orientation = Orientation::horizontal;
};

struct CurveCrossings {
  int count = 0;
  std::vector<CurveCrossing> crossings;  // ascending bond index
  bool degenerate = false;               // some site within tau of the curve
  bool at_arc_end = false;               // semicircle crossing at angle 0 or 180
};

/// Intersections of every bond with the curve; `delta` converts lattice to
/// physical units. A bond meeting the curve twice contributes two crossings.
CurveCrossings count_curve_crossings(std::span<const Point> points, const CutCurve& curve, double delta);
CurveCrossings count_curve_crossings(const Walk& walk, const CutCurve& curve);
/// Same answer, visiting only subtrees whose bounding box meets the annulus
/// of lattice width 1 around the curve.
CurveCrossings count_curve_crossings(const SawTree& tree, const CutCurve& curve, double delta);

struct CrossingSample {
  double angle_deg = 0.0;
  Orientation orientation = Orientation::horizontal;
  int chain_id = 0;
  std::uint64_t sample_index = 0;
};

struct CutcurveConfig {
  Ensemble ensemble = Ensemble::free;  // free with a circle, halfplane with a semicircle
  CutCurve curve;
  int n_steps = 30000;
  double nu = 0.75;  // delta = N^-nu
  std::uint64_t n_samples = 100000;  // examined samples over all chains
  std::uint64_t stride = 200;
  std::int64_t equilibration = -1;
  int n_chains = 4;
  int threads = 1;
  std::uint64_t seed = 1;

  double delta() const;
};

struct ChainSummary {
  int chain_id = 0;
  std::uint64_t seed = 0;
  std::uint64_t examined = 0;
  std::uint64_t accepted = 0;
  std::uint64_t degenerate = 0;
  std::uint64_t arc_end = 0;
  std::uint64_t pivots_attempted = 0;
  std::uint64_t pivots_accepted = 0;
  double tau_int_acceptance = 1.0;  // autocorrelation time of the accept indicator, in samples
};

struct CutcurveResult {
  CutcurveConfig config;
  std::vector<CrossingSample> samples;  // chain-major, sample order within a chain
  std::vector<ChainSummary> chains;

  std::uint64_t examined() const;
  std::uint64_t accepted() const { return samples.size(); }
  double acceptance_fraction() const;
  std::vector<double> angles_deg() const;
  /// Accepted angles split into `per_chain` contiguous blocks of each chain.
  std::vector<std::vector<double>> batches(int per_chain) const;

  void write_csv(const std::filesystem::path& path) const;
  void write_json(const std::filesystem::path& path) const;
};

/// Runs the pivot chain, keeps walks meeting the curve exactly once and
/// records the polar angle of the crossing point.
CutcurveResult sample_cutcurve(const CutcurveConfig& config);

}  // namespace sawlab
