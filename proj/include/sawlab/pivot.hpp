#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "sawlab/lattice.hpp"
#include "sawlab/rng.hpp"
#include "sawlab/saw_tree.hpp"

namespace sawlab {

enum class Ensemble {
  free,                  // N-step walks from the origin
  upper_half_plane,      // ... with every site in y >= 0
  middle_bond_vertical,  // N = 2n+1, sites n and n+1 pinned at (0,0) and (0,1)
};

std::string_view to_string(Ensemble e);
/// Accepts "free", "halfplane" and "midbond".
Ensemble parse_ensemble(std::string_view name);

struct EnsembleConstraint {
  Ensemble kind = Ensemble::free;

  bool admits(std::span<const Point> points) const;
};

/// Default starting configuration for an ensemble: a straight rod.
std::vector<Point> initial_walk(int n_steps, Ensemble kind);

/// A single proposed pivot: sites on one side of `site` are moved by
/// `symmetry` about it. For the middle-bond ensemble, sites before `site` move
/// when `moves_prefix` is set.
struct PivotProposal {
  int site = 0;
  Symmetry symmetry;
  bool moves_prefix = false;
};

/// Draws a proposal: pivot site uniform over the ensemble's pivot sites and a
/// symmetry uniform over the 7 non-identity elements. The kernel does not
/// depend on the current walk.
PivotProposal draw_proposal(Rng& rng, int n_steps, Ensemble kind);

/// Pivot-algorithm Markov chain on fixed-length walks, backed by SawTree.
class PivotChain {
 public:
  PivotChain(int n_steps, EnsembleConstraint constraint, std::uint64_t seed);
  PivotChain(std::span<const Point> initial, EnsembleConstraint constraint, std::uint64_t seed);

  /// One attempted pivot; returns whether it was accepted.
  bool step();
  void advance(std::uint64_t attempts) {
    for (std::uint64_t k = 0; k < attempts; ++k) step();
  }

  /// Attempts a given proposal (used by tests and step()).
  bool attempt(const PivotProposal& proposal);

  int steps() const { return n_steps_; }
  EnsembleConstraint constraint() const { return constraint_; }
  const SawTree& tree() const { return tree_; }
  std::vector<Point> points() const { return tree_.points(); }
  std::uint64_t attempted() const { return attempted_; }
  std::uint64_t accepted() const { return accepted_; }
  std::uint64_t seed() const { return seed_; }
  Rng& rng() { return rng_; }

 private:
  int n_steps_;
  EnsembleConstraint constraint_;
  SawTree tree_;
  std::uint64_t seed_;
  Rng rng_;
  std::uint64_t attempted_ = 0;
  std::uint64_t accepted_ = 0;
};

/// Same chain on an explicit site list with hash-set collision checks.
/// Consumes random numbers identically to PivotChain, so equal seeds give
/// equal trajectories.
class NaivePivotChain {
 public:
  NaivePivotChain(int n_steps, EnsembleConstraint constraint, std::uint64_t seed);

  bool step();
  bool attempt(const PivotProposal& proposal);

  std::span<const Point> points() const { return points_; }
  std::uint64_t attempted() const { return attempted_; }
  std::uint64_t accepted() const { return accepted_; }

 private:
  int n_steps_;
  EnsembleConstraint constraint_;
  std::vector<Point> points_;
  std::vector<Point> scratch_;
  std::unordered_set<Point, PointHash> occupied_;
  Rng rng_;
  std::uint64_t attempted_ = 0;
  std::uint64_t accepted_ = 0;
};

struct ChainSchedule {
  std::uint64_t n_samples = 0;
  std::uint64_t stride = 1;
  /// Attempted pivots discarded before the first sample; negative selects
  /// the default of 20 N.
  std::int64_t equilibration = -1;
};

std::uint64_t equilibration_attempts(const ChainSchedule& schedule, int n_steps);

/// Runs the chain: discards the equilibration attempts, then calls
/// `on_sample(sample_index, chain)` after every `stride` further attempts.
void run_chain(PivotChain& chain, const ChainSchedule& schedule,
               const std::function<void(std::uint64_t, const PivotChain&)>& on_sample);

/// Convenience form that collects the sampled walks.
std::vector<Walk> run_chain(std::span<const Point> initial, EnsembleConstraint constraint,
                            const ChainSchedule& schedule, std::uint64_t seed);

}  // namespace sawlab
