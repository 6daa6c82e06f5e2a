#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "sawlab/lattice.hpp"

namespace sawlab {

/// Connective constant of the hexagonal lattice, sqrt(2 + sqrt(2)).
inline const double kHexagonalMu = std::sqrt(2.0 + std::sqrt(2.0));

/// Numerical estimate of the square-lattice connective constant.
inline constexpr double kSquareMuEstimate = 2.63815853;

inline constexpr int kDefaultEnumerationCap = 16;

struct EnumerationResult {
  int n_steps = 0;
  std::uint64_t count = 0;  // c_N
};

class EnumerationCapExceeded : public std::runtime_error {
 public:
  EnumerationCapExceeded(int n_steps, int cap, double estimated_walks);
  double estimated_walks() const { return estimated_walks_; }

 private:
  double estimated_walks_;
};

/// Rough size of the N-step SAW set, used in refusals.
double estimated_saw_count(int n_steps);

using WalkVisitor = std::function<void(std::span<const Point>)>;

struct EnumerateOptions {
  int cap = kDefaultEnumerationCap;
  /// Branches on the first step run concurrently when > 1; the visitor must
  /// then be safe to call from several threads.
  int threads = 1;
};

/// Depth-first enumeration of every N-step SAW from the origin, visiting each
/// exactly once. Occupancy is tracked in a hash set.
EnumerationResult enumerate_saws(int n_steps, const WalkVisitor& visitor, EnumerateOptions options = {});

/// c_N with the first step fixed east and the first turn fixed north,
/// multiplied back by the lattice symmetry.
std::uint64_t count_saws_reduced(int n_steps, int cap = kDefaultEnumerationCap);

/// Number of N = 2n+1 step SAWs whose middle bond is {(0,0),(0,1)}, counted by
/// growing the two halves directly. Equals c_N / 2.
std::uint64_t count_midbond_walks(int n_steps);

struct MuEstimates {
  std::vector<double> ratios;  // c_{N+1} / c_N
  std::vector<double> roots;   // c_N^{1/N}
};

/// counts[k] holds c_{k+1}.
MuEstimates estimate_mu(std::span<const double> counts);

struct SurvivalRow {
  double l = 0.0;
  std::uint64_t survivors = 0;  // a_N(l, theta)
  std::uint64_t total = 0;      // c_N
  double fraction() const { return total ? static_cast<double>(survivors) / static_cast<double>(total) : 0.0; }
};

struct LineSurvivalTable {
  int n_steps = 0;
  double theta = 0.0;
  std::vector<SurvivalRow> rows;
  std::vector<double> excluded_l;  // grid values where a reachable site lies on the line
};

/// Exact a_N(l, theta) / c_N on an l grid for the line through (0, l).
LineSurvivalTable exact_line_survival(int n_steps, double theta, std::span<const double> l_grid,
                                      int cap = kDefaultEnumerationCap);

/// Exact integral over l in [0, 1] of a_N(l, theta) / c_N, using the
/// theta -> theta^- limit when the line is vertical.
double exact_line_survival_integrated(int n_steps, double theta, int cap = kDefaultEnumerationCap);

/// Exact integral over l in [0, 1] of b_N(l, theta) / d_N for the middle-bond
/// ensemble (N odd).
double exact_midbond_survival_integrated(int n_steps, double theta, int cap = kDefaultEnumerationCap);

/// Every N-step walk with sites n and n+1 at (0,0) and (0,1) (N = 2n+1),
/// taken from the full enumeration.
std::vector<std::vector<Point>> enumerate_midbond_walks(int n_steps);

/// Every N-step walk from the origin with all sites in y >= 0.
std::vector<std::vector<Point>> enumerate_halfplane_walks(int n_steps);

}  // namespace sawlab
