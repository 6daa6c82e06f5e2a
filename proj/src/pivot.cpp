#include "sawlab/pivot.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

namespace sawlab {

std::string_view to_string(Ensemble e) {
  switch (e) {
    case Ensemble::free: return "free";
    case Ensemble::upper_half_plane: return "halfplane";
    case Ensemble::middle_bond_vertical: return "midbond";
  }
  return "unknown";
}

Ensemble parse_ensemble(std::string_view name) {
  if (name == "free") return Ensemble::free;
  if (name == "halfplane") return Ensemble::upper_half_plane;
  if (name == "midbond") return Ensemble::middle_bond_vertical;
  throw std::invalid_argument("unknown ensemble '" + std::string(name) + "'");
}

bool EnsembleConstraint::admits(std::span<const Point> points) const {
  if (points.empty() || !is_self_avoiding(points)) return false;
  switch (kind) {
    case Ensemble::free: return points.front() == Point{0, 0};
    case Ensemble::upper_half_plane:
      return points.front() == Point{0, 0} &&
             std::all_of(points.begin(), points.end(), [](Point p) { return p.y >= 0; });
    case Ensemble::middle_bond_vertical: {
      if (points.size() % 2 != 0) return false;
      const std::size_t n = points.size() / 2 - 1;
      return points[n] == Point{0, 0} && points[n + 1] == Point{0, 1};
    }
  }
  return false;
}

std::vector<Point> initial_walk(int n_steps, Ensemble kind) {
  if (n_steps < 1) throw std::invalid_argument("chain needs at least one step");
  std::vector<Point> pts(static_cast<std::size_t>(n_steps) + 1);
  switch (kind) {
    case Ensemble::free:
      for (int k = 0; k <= n_steps; ++k) pts[static_cast<std::size_t>(k)] = {k, 0};
      break;
    case Ensemble::upper_half_plane:
      for (int k = 0; k <= n_steps; ++k) pts[static_cast<std::size_t>(k)] = {0, k};
      break;
    case Ensemble::middle_bond_vertical: {
      if (n_steps % 2 == 0) throw std::invalid_argument("middle-bond ensemble needs odd N");
      const int half = (n_steps - 1) / 2;
      for (int k = 0; k <= n_steps; ++k) pts[static_cast<std::size_t>(k)] = {0, k - half};
      break;
    }
  }
  return pts;
}

PivotProposal draw_proposal(Rng& rng, int n_steps, Ensemble kind) {
  PivotProposal p;
  if (kind == Ensemble::middle_bond_vertical) {
    const int half = (n_steps - 1) / 2;
    if (half == 0) return p;
    const auto k = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(2 * half)));
    if (k < half) {
      p.site = k + 1;
      p.moves_prefix = true;
    } else {
      p.site = k + 1;  // half + 1 .. 2 half
    }
  } else {
    p.site = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(n_steps)));
  }
  p.symmetry = Symmetry::from_index(1 + static_cast<int>(uniform_index(rng, 7)));
  return p;
}

PivotChain::PivotChain(int n_steps, EnsembleConstraint constraint, std::uint64_t seed)
    : PivotChain(initial_walk(n_steps, constraint.kind), constraint, seed) {}

PivotChain::PivotChain(std::span<const Point> initial, EnsembleConstraint constraint, std::uint64_t seed)
    : n_steps_(static_cast<int>(initial.size()) - 1),
      constraint_(constraint),
      tree_(initial),
      seed_(seed),
      rng_(make_rng(seed)) {
  if (!constraint.admits(initial)) throw std::invalid_argument("initial walk violates the ensemble constraint");
}

bool PivotChain::attempt(const PivotProposal& p) {
  ++attempted_;
  bool ok = false;
  switch (constraint_.kind) {
    case Ensemble::free: ok = tree_.try_suffix_pivot(p.site, p.symmetry, false); break;
    case Ensemble::upper_half_plane: ok = tree_.try_suffix_pivot(p.site, p.symmetry, true); break;
    case Ensemble::middle_bond_vertical:
      if (n_steps_ < 3) break;
      if (p.moves_prefix) {
        // Rotating the prefix by g equals rotating the suffix by g^-1 and then
        // moving the whole walk by g about the pivot.
        const Symmetry inv = p.symmetry.inverse();
        if (tree_.suffix_pivot_is_self_avoiding(p.site, inv)) {
          const Point pivot = tree_.site(p.site);
          tree_.apply_suffix_pivot(p.site, inv);
          tree_.move_rigidly(p.symmetry, pivot);
          ok = true;
        }
      } else {
        ok = tree_.try_suffix_pivot(p.site, p.symmetry, false);
      }
      break;
  }
  if (ok) ++accepted_;
  return ok;
}

bool PivotChain::step() {
  if (constraint_.kind == Ensemble::middle_bond_vertical && n_steps_ < 3) {
    ++attempted_;
    return false;
  }
  return attempt(draw_proposal(rng_, n_steps_, constraint_.kind));
}

NaivePivotChain::NaivePivotChain(int n_steps, EnsembleConstraint constraint, std::uint64_t seed)
    : n_steps_(n_steps),
      constraint_(constraint),
      points_(initial_walk(n_steps, constraint.kind)),
      rng_(make_rng(seed)) {
  occupied_.insert(points_.begin(), points_.end());
}

bool NaivePivotChain::attempt(const PivotProposal& p) {
  ++attempted_;
  if (constraint_.kind == Ensemble::middle_bond_vertical && n_steps_ < 3) return false;
  const auto site = static_cast<std::size_t>(p.site);
  const Point pivot = points_[site];
  const std::size_t first = p.moves_prefix ? 0 : site + 1;
  const std::size_t last = p.moves_prefix ? site : points_.size();  // exclusive

  // The moving block is rigid, so only collisions with the fixed block matter.
  std::unordered_set<Point, PointHash> fixed;
  fixed.reserve(points_.size() * 2);
  for (std::size_t k = 0; k < points_.size(); ++k) {
    if (k < first || k >= last) fixed.insert(points_[k]);
  }
  scratch_.assign(points_.begin(), points_.end());
  for (std::size_t k = first; k < last; ++k) {
    const Point q = pivot + p.symmetry.apply(points_[k] - pivot);
    if (constraint_.kind == Ensemble::upper_half_plane && q.y < 0) return false;
    if (fixed.contains(q)) return false;
    scratch_[k] = q;
  }
  points_.swap(scratch_);
  ++accepted_;
  return true;
}

bool NaivePivotChain::step() {
  if (constraint_.kind == Ensemble::middle_bond_vertical && n_steps_ < 3) {
    ++attempted_;
    return false;
  }
  return attempt(draw_proposal(rng_, n_steps_, constraint_.kind));
}

std::uint64_t equilibration_attempts(const ChainSchedule& schedule, int n_steps) {
  return schedule.equilibration < 0 ? 20ULL * static_cast<std::uint64_t>(n_steps)
                                    : static_cast<std::uint64_t>(schedule.equilibration);
}

void run_chain(PivotChain& chain, const ChainSchedule& schedule,
               const std::function<void(std::uint64_t, const PivotChain&)>& on_sample) {
  if (schedule.stride < 1) throw std::invalid_argument("stride must be at least 1");
  chain.advance(equilibration_attempts(schedule, chain.steps()));
  for (std::uint64_t s = 0; s < schedule.n_samples; ++s) {
    chain.advance(schedule.stride);
    on_sample(s, chain);
  }
}

std::vector<Walk> run_chain(std::span<const Point> initial, EnsembleConstraint constraint,
                            const ChainSchedule& schedule, std::uint64_t seed) {
  PivotChain chain(initial, constraint, seed);
  std::vector<Walk> out;
  out.reserve(schedule.n_samples);
  run_chain(chain, schedule, [&](std::uint64_t, const PivotChain& c) { out.emplace_back(c.points()); });
  return out;
}

}  // namespace sawlab
