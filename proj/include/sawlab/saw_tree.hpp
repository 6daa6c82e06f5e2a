#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "sawlab/lattice.hpp"

namespace sawlab {

/// Axis-aligned integer bounding box (inclusive).
struct Box {
  std::int32_t xmin = 0;
  std::int32_t xmax = 0;
  std::int32_t ymin = 0;
  std::int32_t ymax = 0;

  friend constexpr bool operator==(const Box&, const Box&) = default;
};

constexpr bool disjoint(const Box& a, const Box& b) {
  return a.xmax < b.xmin || b.xmax < a.xmin || a.ymax < b.ymin || b.ymax < a.ymin;
}

constexpr Box merge(const Box& a, const Box& b) {
  return {std::min(a.xmin, b.xmin), std::max(a.xmax, b.xmax), std::min(a.ymin, b.ymin),
          std::max(a.ymax, b.ymax)};
}

/// Placement of a local frame: global = offset + rotation(local).
struct Frame {
  Point offset;
  Symmetry rotation;

  constexpr Point apply(Point p) const { return offset + rotation.apply(p); }
  constexpr Box apply(const Box& b) const {
    const Point p = apply(Point{b.xmin, b.ymin});
    const Point q = apply(Point{b.xmax, b.ymax});
    return {std::min(p.x, q.x), std::max(p.x, q.x), std::min(p.y, q.y), std::max(p.y, q.y)};
  }
};

/// Counters filled by an intersection test.
struct CheckStats {
  std::uint64_t box_tests = 0;
  std::uint64_t site_comparisons = 0;
};

/// Binary tree over the sites of a self-avoiding walk for fast pivot moves.
///
/// Every node covers a contiguous run of sites and stores, in its own frame,
/// the end-to-end vector and bounding box of that run; the frame origin is the
/// site preceding the run, and the run's first step is (1,0) before the
/// node's ancestors rotate it. An internal node's symmetry places its right
/// child relative to its left child. The tree shape is fixed and balanced;
/// a pivot only rewrites the symmetries on one root-to-leaf path.
class SawTree {
 public:
  explicit SawTree(std::span<const Point> points);

  static SawTree straight(int n_steps, Point direction = {1, 0});

  int steps() const { return n_sites_ - 1; }
  int sites() const { return n_sites_; }

  Point site(int i) const;
  void materialize(std::vector<Point>& out) const;
  std::vector<Point> points() const {
    std::vector<Point> out;
    materialize(out);
    return out;
  }

  Box bounding_box() const { return root_frame_.apply(nodes_[root_].box); }

  /// Whether rotating sites i+1..N by g about site i keeps the walk
  /// self-avoiding.
  bool suffix_pivot_is_self_avoiding(int i, Symmetry g, CheckStats* stats = nullptr) const;

  /// Checks and, when admissible, applies the suffix pivot. With
  /// `upper_half_plane` the rotated sites must also satisfy y >= 0.
  bool try_suffix_pivot(int i, Symmetry g, bool upper_half_plane = false);

  /// Applies the suffix pivot unconditionally.
  void apply_suffix_pivot(int i, Symmetry g);

  /// Moves the whole walk by x -> pivot + g (x - pivot).
  void move_rigidly(Symmetry g, Point pivot);

  /// Depth-first walk over the sites in order. `skip(box)` receives the global
  /// bounding box of a subtree and may prune it; `visit(index, site)` is
  /// called for every site in an unpruned leaf.
  template <class Skip, class Visit>
  void visit_sites(Skip&& skip, Visit&& visit) const {
    struct Item {
      std::int32_t node;
      std::int32_t first;
      Frame frame;
    };
    std::array<Item, 2 * kMaxDepth> stack;
    int top = 0;
    stack[top++] = {root_, 0, root_frame_};
    while (top > 0) {
      const Item it = stack[--top];
      const Node& nd = nodes_[static_cast<std::size_t>(it.node)];
      if (skip(it.frame.apply(nd.box))) continue;
      if (nd.n == 1) {
        visit(it.first, it.frame.apply(Point{nd.end}));
        continue;
      }
      const Node& left = nodes_[static_cast<std::size_t>(nd.left)];
      stack[top++] = {nd.right, it.first + left.n, right_frame(it.frame, nd)};
      stack[top++] = {nd.left, it.first, it.frame};
    }
  }

 private:
  static constexpr int kMaxDepth = 40;

  struct Node {
    Box box;
    Point end;
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::int32_t n = 1;
    Symmetry q;
  };

  struct Piece {
    std::int32_t node;
    Frame frame;
  };

  struct Path {
    std::array<std::int32_t, kMaxDepth> nodes;
    std::array<Frame, kMaxDepth> frames;
    std::array<bool, kMaxDepth> went_left;
    int depth = 0;  // number of internal nodes on the path
    Frame leaf_frame;
    std::int32_t leaf = -1;
  };

  SawTree() = default;

  std::int32_t build(std::span<const Point> points, std::span<const Symmetry> site_frames, int lo, int hi);
  void recompute(std::int32_t v);
  Frame right_frame(const Frame& f, const Node& nd) const {
    return {f.apply(nodes_[static_cast<std::size_t>(nd.left)].end), f.rotation * nd.q};
  }
  void descend(int i, Path& path) const;
  bool pieces_intersect(const Path& path, Symmetry g, Point pivot, bool upper_half_plane,
                        CheckStats* stats) const;
  bool intersect(std::int32_t a, const Frame& fa, std::int32_t b, const Frame& fb, CheckStats* stats) const;
  void commit(const Path& path, Symmetry g);

  std::vector<Node> nodes_;
  std::int32_t root_ = -1;
  Frame root_frame_;
  int n_sites_ = 0;
};

/// Reference check used to validate SawTree: rotate sites i+1..N of an
/// explicit walk and look for collisions in a hash set.
bool naive_suffix_pivot_is_self_avoiding(std::span<const Point> points, int i, Symmetry g);

}  // namespace sawlab
