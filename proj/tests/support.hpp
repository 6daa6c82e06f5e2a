#pragma once

#include <array>
#include <unordered_set>
#include <vector>

#include "sawlab/lattice.hpp"
#include "sawlab/rng.hpp"

namespace sawlab::testing {

// Random growth with restart on trapping; not uniform, only meant to produce
// irregular self-avoiding test inputs.
inline std::vector<Point> grow_random_saw(Rng& rng, int n_steps) {
  constexpr std::array<Point, 4> steps{{{1, 0}, {0, 1}, {-1, 0}, {0, -1}}};
  for (;;) {
    std::vector<Point> pts{{0, 0}};
    std::unordered_set<Point, PointHash> seen{{0, 0}};
    while (static_cast<int>(pts.size()) <= n_steps) {
      std::array<Point, 4> free{};
      int n_free = 0;
      for (Point s : steps) {
        const Point q = pts.back() + s;
        if (!seen.contains(q)) free[static_cast<std::size_t>(n_free++)] = q;
      }
      if (n_free == 0) break;
      const Point q = free[uniform_index(rng, static_cast<std::uint64_t>(n_free))];
      pts.push_back(q);
      seen.insert(q);
    }
    if (static_cast<int>(pts.size()) == n_steps + 1) return pts;
  }
}

}  // namespace sawlab::testing
