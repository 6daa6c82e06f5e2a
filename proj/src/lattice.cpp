#include "sawlab/lattice.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <unordered_set>

namespace sawlab {

int Symmetry::index() const {
  for (int k = 0; k < 8; ++k) {
    if (from_index(k) == *this) return k;
  }
  throw std::logic_error("matrix is not a square-lattice symmetry");
}

Orientation Bond::orientation() const {
  if (!are_neighbors(a, b)) throw std::invalid_argument("bond endpoints are not nearest neighbors");
  return a.x == b.x ? Orientation::vertical : Orientation::horizontal;
}

Walk::Walk(std::vector<Point> points, double delta) : points_(std::move(points)), delta_(delta) {
  if (points_.empty()) throw std::invalid_argument("walk needs at least one site");
  if (!(delta_ > 0.0)) throw std::invalid_argument("lattice spacing must be positive");
  if (!is_self_avoiding(points_)) throw std::invalid_argument("walk revisits a site");
}

Walk Walk::straight_rod(int n_steps, Point direction, double delta) {
  if (n_steps < 0) throw std::invalid_argument("negative step count");
  std::vector<Point> pts(static_cast<std::size_t>(n_steps) + 1);
  for (int i = 0; i <= n_steps; ++i) pts[static_cast<std::size_t>(i)] = {direction.x * i, direction.y * i};
  return Walk(std::move(pts), delta);
}

Walk Walk::transformed(Symmetry s) const {
  std::vector<Point> pts;
  pts.reserve(points_.size());
  for (Point p : points_) pts.push_back(s.apply(p));
  return Walk(std::move(pts), delta_);
}

double wrap_angle(double angle, double period) {
  double r = std::fmod(angle, period);
  if (r < 0.0) r += period;
  if (r >= period) r -= period;
  return r;
}

Line::Line(double theta, Vec2 through)
    : theta_(wrap_angle(theta, std::numbers::pi)),
      through_(through),
      cos_(std::cos(theta_)),
      sin_(std::sin(theta_)) {
  if (!std::isfinite(through.x) || !std::isfinite(through.y)) {
    throw std::invalid_argument("line offset must be finite");
  }
}

Line Line::transformed(Symmetry s) const {
  const Vec2 d = s.apply(direction());
  return Line(std::atan2(d.y, d.x), s.apply(through_));
}

namespace {

// -1 / +1 for a strict side, 0 for a flagged touch.
int side_of(const Line& line, Point p, double delta, TouchRule rule) {
  const Vec2 q = to_physical(p, delta);
  const double s = line.signed_distance(q) / delta;
  if (s > kTouchTolerance) return 1;
  if (s < -kTouchTolerance) return -1;
  if (rule == TouchRule::limit_below) {
    const double rate = -line.signed_distance_rate(q) / delta;
    if (rate > kTouchTolerance) return 1;
    if (rate < -kTouchTolerance) return -1;
  }
  return 0;
}

}  // namespace

SegmentTest segment_crosses_line(const Bond& bond, const Line& line, double delta, TouchRule rule) {
  const int sa = side_of(line, bond.a, delta, rule);
  const int sb = side_of(line, bond.b, delta, rule);
  if (sa == 0 || sb == 0) return {true, true};
  return {sa != sb, false};
}

LineCrossings line_crossings(std::span<const Point> points, const Line& line, double delta,
                             TouchRule rule) {
  LineCrossings out;
  if (points.empty()) return out;
  int prev = side_of(line, points[0], delta, rule);
  out.degenerate = prev == 0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    const int cur = side_of(line, points[i], delta, rule);
    if (cur == 0) out.degenerate = true;
    if (prev == 0 || cur == 0 || prev != cur) {
      ++out.count;
      out.bond_indices.push_back(static_cast<int>(i) - 1);
    }
    prev = cur;
  }
  return out;
}

LineCrossings walk_line_crossings(const Walk& walk, const Line& line, TouchRule rule) {
  return line_crossings(walk.points(), line, walk.delta(), rule);
}

bool is_self_avoiding(std::span<const Point> points) {
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (!are_neighbors(points[i - 1], points[i])) {
      throw std::invalid_argument("step " + std::to_string(i) + " is not a unit lattice step");
    }
  }
  std::unordered_set<Point, PointHash> seen;
  seen.reserve(points.size() * 2);
  for (Point p : points) {
    if (!seen.insert(p).second) return false;
  }
  return true;
}

}  // namespace sawlab
