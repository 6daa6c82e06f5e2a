#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace sawlab {

/// Site of the square lattice in integer lattice units.
struct Point {
  std::int32_t x = 0;
  std::int32_t y = 0;

  friend constexpr bool operator==(Point, Point) = default;
  friend constexpr Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
};

struct PointHash {
  std::size_t operator()(Point p) const noexcept {
    auto ux = static_cast<std::uint64_t>(static_cast<std::uint32_t>(p.x));
    auto uy = static_cast<std::uint64_t>(static_cast<std::uint32_t>(p.y));
    std::uint64_t h = (ux << 32) | uy;
    h ^= h >> 33;
    h *= 0xff51afd7ed558ccdULL;
    h ^= h >> 33;
    return static_cast<std::size_t>(h);
  }
};

constexpr std::int64_t norm2(Point p) {
  return std::int64_t{p.x} * p.x + std::int64_t{p.y} * p.y;
}

constexpr bool are_neighbors(Point a, Point b) {
  const Point d = a - b;
  return (d.x == 0 && (d.y == 1 || d.y == -1)) || (d.y == 0 && (d.x == 1 || d.x == -1));
}

/// Position in physical units (lattice units times the spacing).
struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

constexpr Vec2 to_physical(Point p, double delta) { return {p.x * delta, p.y * delta}; }

/// One of the eight elements of the square-lattice point group, stored as
/// the integer matrix [a b; c d] acting on column vectors.
class Symmetry {
 public:
  constexpr Symmetry() = default;

  /// 0 identity, 1..3 rotations by 90/180/270 degrees, 4 reflection y -> -y,
  /// 5 reflection x -> -x, 6 reflection in y = x, 7 reflection in y = -x.
  static constexpr Symmetry from_index(int k) {
    constexpr std::array<std::array<std::int8_t, 4>, 8> table{{
        {1, 0, 0, 1},
        {0, -1, 1, 0},
        {-1, 0, 0, -1},
        {0, 1, -1, 0},
        {1, 0, 0, -1},
        {-1, 0, 0, 1},
        {0, 1, 1, 0},
        {0, -1, -1, 0},
    }};
    const auto& m = table[static_cast<std::size_t>(k)];
    return Symmetry(m[0], m[1], m[2], m[3]);
  }

  static constexpr Symmetry identity() { return {}; }
  static constexpr Symmetry rotation90() { return from_index(1); }

  constexpr Point apply(Point p) const { return {a_ * p.x + b_ * p.y, c_ * p.x + d_ * p.y}; }
  constexpr Vec2 apply(Vec2 p) const { return {a_ * p.x + b_ * p.y, c_ * p.x + d_ * p.y}; }

  /// (s * t)(p) == s(t(p)).
  friend constexpr Symmetry operator*(Symmetry s, Symmetry t) {
    return Symmetry(static_cast<std::int8_t>(s.a_ * t.a_ + s.b_ * t.c_),
                    static_cast<std::int8_t>(s.a_ * t.b_ + s.b_ * t.d_),
                    static_cast<std::int8_t>(s.c_ * t.a_ + s.d_ * t.c_),
                    static_cast<std::int8_t>(s.c_ * t.b_ + s.d_ * t.d_));
  }

  // Orthogonal, so the inverse is the transpose.
  constexpr Symmetry inverse() const { return Symmetry(a_, c_, b_, d_); }

  constexpr bool is_identity() const { return a_ == 1 && b_ == 0 && c_ == 0 && d_ == 1; }

  int index() const;

  friend constexpr bool operator==(Symmetry, Symmetry) = default;

  constexpr std::int8_t a() const { return a_; }
  constexpr std::int8_t b() const { return b_; }
  constexpr std::int8_t c() const { return c_; }
  constexpr std::int8_t d() const { return d_; }

 private:
  constexpr Symmetry(std::int8_t a, std::int8_t b, std::int8_t c, std::int8_t d)
      : a_(a), b_(b), c_(c), d_(d) {}

  std::int8_t a_ = 1;
  std::int8_t b_ = 0;
  std::int8_t c_ = 0;
  std::int8_t d_ = 1;
};

enum class Orientation { horizontal, vertical };

struct Bond {
  Point a;
  Point b;

  /// Throws std::invalid_argument unless a and b are nearest neighbors.
  Orientation orientation() const;
};

struct WalkContext {
  double delta = 1.0;
  int n_steps = 0;
};

/// Self-avoiding walk stored as its ordered site list. Construction validates
/// unit steps and self-avoidance.
class Walk {
 public:
  explicit Walk(std::vector<Point> points, double delta = 1.0);

  /// Straight rod of n steps from the origin along `direction`.
  static Walk straight_rod(int n_steps, Point direction = {1, 0}, double delta = 1.0);

  std::span<const Point> points() const { return points_; }
  int steps() const { return static_cast<int>(points_.size()) - 1; }
  WalkContext context() const { return {delta_, steps()}; }
  double delta() const { return delta_; }
  Bond bond(int i) const {
    return {points_[static_cast<std::size_t>(i)], points_[static_cast<std::size_t>(i) + 1]};
  }

  /// Image under a point-group element acting about the lattice origin.
  Walk transformed(Symmetry s) const;

 private:
  std::vector<Point> points_;
  double delta_;
};

/// Sites within this signed distance of a line (in units of the spacing) are
/// treated as touching it.
inline constexpr double kTouchTolerance = 1e-12;

/// Infinite straight line with polar angle theta (canonical range [0, pi))
/// passing through a physical point.
class Line {
 public:
  Line(double theta, Vec2 through);

  double theta() const { return theta_; }
  Vec2 through() const { return through_; }
  Vec2 direction() const { return {cos_, sin_}; }

  /// n . (p - through) with unit normal n = (-sin, cos).
  double signed_distance(Vec2 p) const {
    return -(p.x - through_.x) * sin_ + (p.y - through_.y) * cos_;
  }

  /// d/dtheta of signed_distance at fixed `through`.
  double signed_distance_rate(Vec2 p) const {
    return -(p.x - through_.x) * cos_ - (p.y - through_.y) * sin_;
  }

  Line transformed(Symmetry s) const;

 private:
  double theta_;
  Vec2 through_;
  double cos_;
  double sin_;
};

/// How a site lying on the line is resolved. `flag` reports the touch;
/// `limit_below` uses the side it occupies for the line rotated by an
/// infinitesimal negative angle about its through-point.
enum class TouchRule { flag, limit_below };

struct SegmentTest {
  bool crosses = false;
  bool degenerate = false;
};

/// Whether the closed physical segment [a delta, b delta] meets the line.
SegmentTest segment_crosses_line(const Bond& bond, const Line& line, double delta,
                                 TouchRule rule = TouchRule::flag);

struct LineCrossings {
  int count = 0;
  std::vector<int> bond_indices;
  bool degenerate = false;
};

LineCrossings line_crossings(std::span<const Point> points, const Line& line, double delta,
                             TouchRule rule = TouchRule::flag);

LineCrossings walk_line_crossings(const Walk& walk, const Line& line,
                                  TouchRule rule = TouchRule::flag);

/// True iff the points are pairwise distinct. Throws std::invalid_argument on
/// a step that is not a unit lattice step.
bool is_self_avoiding(std::span<const Point> points);

/// Angle reduced to [0, period).
double wrap_angle(double angle, double period);

}  // namespace sawlab
