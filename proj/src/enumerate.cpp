#include "sawlab/enumerate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <cstdlib>
#include <mutex>
#include <string>
#include <thread>
#include <unordered_set>

namespace sawlab {

namespace {

constexpr std::array<Point, 4> kSteps{{{1, 0}, {0, 1}, {-1, 0}, {0, -1}}};

void check_cap(int n_steps, int cap) {
  if (n_steps < 0) throw std::invalid_argument("negative step count");
  if (n_steps > cap) throw EnumerationCapExceeded(n_steps, cap, estimated_saw_count(n_steps));
}

// Plain recursive search; the occupancy set is the only bookkeeping.
class HashSetSearch {
 public:
  HashSetSearch(int n_steps, const WalkVisitor& visitor) : n_(n_steps), visitor_(visitor) {
    path_.reserve(static_cast<std::size_t>(n_steps) + 1);
    occupied_.reserve(static_cast<std::size_t>(n_steps) * 4 + 4);
  }

  std::uint64_t run_from(std::span<const Point> prefix) {
    for (Point p : prefix) {
      path_.push_back(p);
      occupied_.insert(p);
    }
    grow();
    return count_;
  }

 private:
  void grow() {
    if (static_cast<int>(path_.size()) == n_ + 1) {
      ++count_;
      if (visitor_) visitor_(path_);
      return;
    }
    const Point tip = path_.back();
    for (Point s : kSteps) {
      const Point next = tip + s;
      if (!occupied_.insert(next).second) continue;
      path_.push_back(next);
      grow();
      path_.pop_back();
      occupied_.erase(next);
    }
  }

  int n_;
  const WalkVisitor& visitor_;
  std::vector<Point> path_;
  std::unordered_set<Point, PointHash> occupied_;
  std::uint64_t count_ = 0;
};

// Flat occupancy grid centred on the origin.
class Grid {
 public:
  explicit Grid(int radius) : radius_(radius), side_(2 * radius + 1), cells_(static_cast<std::size_t>(side_) * side_, 0) {}
  std::uint8_t& at(Point p) {
    return cells_[static_cast<std::size_t>(p.y + radius_) * static_cast<std::size_t>(side_) +
                  static_cast<std::size_t>(p.x + radius_)];
  }

 private:
  int radius_;
  int side_;
  std::vector<std::uint8_t> cells_;
};

struct ReducedCounter {
  int n;
  Grid grid;
  std::uint64_t straight = 0;
  std::uint64_t turned = 0;

  void grow(Point tip, int depth, bool has_turned) {
    if (depth == n) {
      (has_turned ? turned : straight) += 1;
      return;
    }
    for (int k = 0; k < 4; ++k) {
      // Before the first turn only east (continue) and north (turn) are
      // explored; south is the mirror image and west is a reversal.
      if (!has_turned && k != 0 && k != 1) continue;
      const Point next = tip + kSteps[static_cast<std::size_t>(k)];
      auto& cell = grid.at(next);
      if (cell) continue;
      cell = 1;
      grow(next, depth + 1, has_turned || k == 1);
      cell = 0;
    }
  }
};

}  // namespace

EnumerationCapExceeded::EnumerationCapExceeded(int n_steps, int cap, double estimated_walks)
    : std::runtime_error("enumeration of N=" + std::to_string(n_steps) + " exceeds cap " + std::to_string(cap) +
                         " (about " + std::to_string(estimated_walks) + " walks)"),
      estimated_walks_(estimated_walks) {}

double estimated_saw_count(int n_steps) {
  return 1.1771 * std::pow(kSquareMuEstimate, n_steps) * std::pow(std::max(n_steps, 1), 11.0 / 32.0);
}

EnumerationResult enumerate_saws(int n_steps, const WalkVisitor& visitor, EnumerateOptions options) {
  check_cap(n_steps, options.cap);
  if (n_steps == 0) {
    const std::array<Point, 1> origin{};
    if (visitor) visitor(origin);
    return {0, 1};
  }
  std::array<std::uint64_t, 4> branch{};
  auto run_branch = [&](std::size_t k) {
    const std::array<Point, 2> prefix{Point{0, 0}, kSteps[k]};
    HashSetSearch search(n_steps, visitor);
    branch[k] = search.run_from(prefix);
  };
  if (options.threads > 1) {
    std::vector<std::thread> pool;
    for (std::size_t k = 0; k < 4; ++k) pool.emplace_back(run_branch, k);
    for (auto& t : pool) t.join();
  } else {
    for (std::size_t k = 0; k < 4; ++k) run_branch(k);
  }
  std::uint64_t total = 0;
  for (auto c : branch) total += c;
  return {n_steps, total};
}

std::uint64_t count_saws_reduced(int n_steps, int cap) {
  check_cap(n_steps, cap);
  if (n_steps == 0) return 1;
  ReducedCounter counter{n_steps, Grid(n_steps + 1)};
  counter.grid.at({0, 0}) = 1;
  counter.grid.at({1, 0}) = 1;
  counter.grow({1, 0}, 1, false);
  return 4 * (counter.straight + 2 * counter.turned);
}

std::uint64_t count_midbond_walks(int n_steps) {
  if (n_steps < 1 || n_steps % 2 == 0) throw std::invalid_argument("middle-bond walks need odd N");
  check_cap(n_steps, kDefaultEnumerationCap);
  const int half = (n_steps - 1) / 2;
  Grid grid(n_steps + 2);
  grid.at({0, 0}) = 1;
  grid.at({0, 1}) = 1;
  std::uint64_t pairs = 0;

  std::function<void(Point, int, bool)> grow = [&](Point tip, int depth, bool second) {
    if (depth == half) {
      if (second) {
        ++pairs;
      } else {
        grow({0, 1}, 0, true);
      }
      return;
    }
    for (Point s : kSteps) {
      const Point next = tip + s;
      auto& cell = grid.at(next);
      if (cell) continue;
      cell = 1;
      grow(next, depth + 1, second);
      cell = 0;
    }
  };
  grow({0, 0}, 0, false);
  // Both orientations of the middle bond.
  return 2 * pairs;
}

MuEstimates estimate_mu(std::span<const double> counts) {
  if (counts.size() < 2) throw std::invalid_argument("need at least two consecutive counts");
  MuEstimates out;
  for (std::size_t k = 0; k + 1 < counts.size(); ++k) out.ratios.push_back(counts[k + 1] / counts[k]);
  for (std::size_t k = 0; k < counts.size(); ++k) {
    out.roots.push_back(std::pow(counts[k], 1.0 / static_cast<double>(k + 1)));
  }
  return out;
}

LineSurvivalTable exact_line_survival(int n_steps, double theta, std::span<const double> l_grid, int cap) {
  check_cap(n_steps, cap);
  LineSurvivalTable table;
  table.n_steps = n_steps;
  table.theta = theta;

  std::vector<Line> lines;
  for (double l : l_grid) {
    const Line line(theta, {0.0, l});
    bool touches = false;
    for (int x = -n_steps; x <= n_steps && !touches; ++x) {
      const int span = n_steps - std::abs(x);
      for (int y = -span; y <= span; ++y) {
        if (std::abs(line.signed_distance({double(x), double(y)})) <= kTouchTolerance) {
          touches = true;
          break;
        }
      }
    }
    if (touches) {
      table.excluded_l.push_back(l);
    } else {
      table.rows.push_back({l, 0, 0});
      lines.push_back(line);
    }
  }

  std::uint64_t total = 0;
  enumerate_saws(n_steps, [&](std::span<const Point> pts) {
    ++total;
    for (std::size_t k = 0; k < lines.size(); ++k) {
      if (line_crossings(pts, lines[k], 1.0).count == 0) ++table.rows[k].survivors;
    }
  }, {cap, 1});
  for (auto& row : table.rows) row.total = total;
  return table;
}

namespace {

// Intercept parameter at which the line through (0, l) passes the site.
double intercept(Point p, double tan_theta) { return p.y - p.x * tan_theta; }

}  // namespace

double exact_line_survival_integrated(int n_steps, double theta, int cap) {
  const double t = std::tan(wrap_angle(theta, std::numbers::pi));
  double sum = 0.0;
  std::uint64_t total = 0;
  enumerate_saws(n_steps, [&](std::span<const Point> pts) {
    ++total;
    double hi = 0.0;
    for (Point p : pts) hi = std::max(hi, intercept(p, t));
    sum += 1.0 - std::min(hi, 1.0);
  }, {cap, 1});
  return sum / static_cast<double>(total);
}

std::vector<std::vector<Point>> enumerate_midbond_walks(int n_steps) {
  if (n_steps < 1 || n_steps % 2 == 0) throw std::invalid_argument("middle-bond walks need odd N");
  const auto half = static_cast<std::size_t>((n_steps - 1) / 2);
  std::vector<std::vector<Point>> out;
  enumerate_saws(n_steps, [&](std::span<const Point> pts) {
    if (pts[half + 1] - pts[half] != Point{0, 1}) return;
    std::vector<Point> w(pts.begin(), pts.end());
    const Point shift = pts[half];
    for (auto& p : w) p = p - shift;
    out.push_back(std::move(w));
  });
  return out;
}

std::vector<std::vector<Point>> enumerate_halfplane_walks(int n_steps) {
  std::vector<std::vector<Point>> out;
  enumerate_saws(n_steps, [&](std::span<const Point> pts) {
    if (std::all_of(pts.begin(), pts.end(), [](Point p) { return p.y >= 0; })) {
      out.emplace_back(pts.begin(), pts.end());
    }
  });
  return out;
}

double exact_midbond_survival_integrated(int n_steps, double theta, int cap) {
  check_cap(n_steps, cap);
  const double t = std::tan(wrap_angle(theta, std::numbers::pi));
  const auto half = static_cast<std::size_t>((n_steps - 1) / 2);
  const auto walks = enumerate_midbond_walks(n_steps);
  double sum = 0.0;
  for (const auto& w : walks) {
    double lo = 0.0;
    double hi = 1.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double u = intercept(w[i], t);
      if (i <= half) {
        lo = std::max(lo, u);
      } else {
        hi = std::min(hi, u);
      }
    }
    sum += std::max(0.0, hi - lo);
  }
  return sum / static_cast<double>(walks.size());
}

}  // namespace sawlab
