#include "sawlab/saw_tree.hpp"

#include <stdexcept>
#include <unordered_set>

namespace sawlab {

namespace {

constexpr Point kUnit{1, 0};

// Rotation taking (1,0) to the unit step d.
Symmetry frame_for_step(Point d) {
  if (d == Point{1, 0}) return Symmetry::from_index(0);
  if (d == Point{0, 1}) return Symmetry::from_index(1);
  if (d == Point{-1, 0}) return Symmetry::from_index(2);
  if (d == Point{0, -1}) return Symmetry::from_index(3);
  throw std::invalid_argument("walk contains a non-unit step");
}

}  // namespace

SawTree::SawTree(std::span<const Point> points) {
  if (points.size() < 2) throw std::invalid_argument("tree needs a walk with at least one step");
  if (!is_self_avoiding(points)) throw std::invalid_argument("walk revisits a site");
  if (points.size() > (std::size_t{1} << (kMaxDepth - 2))) throw std::invalid_argument("walk too long");
  n_sites_ = static_cast<int>(points.size());

  std::vector<Symmetry> site_frames(points.size());
  site_frames[0] = Symmetry::identity();
  for (std::size_t k = 1; k < points.size(); ++k) site_frames[k] = frame_for_step(points[k] - points[k - 1]);

  nodes_.resize(points.size());
  nodes_.reserve(2 * points.size());
  for (auto& leaf : nodes_) {
    leaf.end = kUnit;
    leaf.box = {1, 1, 0, 0};
    leaf.n = 1;
  }
  root_ = build(points, site_frames, 0, n_sites_ - 1);
  root_frame_ = {points[0] - site_frames[0].apply(kUnit), site_frames[0]};
}

SawTree SawTree::straight(int n_steps, Point direction) {
  if (n_steps < 1) throw std::invalid_argument("tree needs at least one step");
  std::vector<Point> pts(static_cast<std::size_t>(n_steps) + 1);
  for (int k = 0; k <= n_steps; ++k) pts[static_cast<std::size_t>(k)] = {direction.x * k, direction.y * k};
  return SawTree(pts);
}

std::int32_t SawTree::build(std::span<const Point> points, std::span<const Symmetry> site_frames, int lo,
                            int hi) {
  if (lo == hi) return lo;
  const int n = hi - lo + 1;
  const int n_left = (n + 1) / 2;
  const std::int32_t l = build(points, site_frames, lo, lo + n_left - 1);
  const std::int32_t r = build(points, site_frames, lo + n_left, hi);
  Node nd;
  nd.left = l;
  nd.right = r;
  nd.n = n;
  nd.q = site_frames[static_cast<std::size_t>(lo)].inverse() * site_frames[static_cast<std::size_t>(lo + n_left)];
  nodes_.push_back(nd);
  const auto v = static_cast<std::int32_t>(nodes_.size() - 1);
  recompute(v);
  return v;
}

void SawTree::recompute(std::int32_t v) {
  Node& nd = nodes_[static_cast<std::size_t>(v)];
  const Node& l = nodes_[static_cast<std::size_t>(nd.left)];
  const Node& r = nodes_[static_cast<std::size_t>(nd.right)];
  const Frame place{l.end, nd.q};
  nd.end = place.apply(r.end);
  nd.box = merge(l.box, place.apply(r.box));
}

void SawTree::descend(int i, Path& path) const {
  std::int32_t v = root_;
  Frame f = root_frame_;
  int k = i;
  int depth = 0;
  while (nodes_[static_cast<std::size_t>(v)].n > 1) {
    const Node& nd = nodes_[static_cast<std::size_t>(v)];
    const Node& left = nodes_[static_cast<std::size_t>(nd.left)];
    path.nodes[static_cast<std::size_t>(depth)] = v;
    path.frames[static_cast<std::size_t>(depth)] = f;
    if (k < left.n) {
      path.went_left[static_cast<std::size_t>(depth)] = true;
      v = nd.left;
    } else {
      path.went_left[static_cast<std::size_t>(depth)] = false;
      k -= left.n;
      f = right_frame(f, nd);
      v = nd.right;
    }
    ++depth;
  }
  path.depth = depth;
  path.leaf = v;
  path.leaf_frame = f;
}

Point SawTree::site(int i) const {
  if (i < 0 || i >= n_sites_) throw std::out_of_range("site index");
  Path path;
  descend(i, path);
  return path.leaf_frame.apply(kUnit);
}

void SawTree::materialize(std::vector<Point>& out) const {
  out.resize(static_cast<std::size_t>(n_sites_));
  visit_sites([](const Box&) { return false; },
              [&](int idx, Point p) { out[static_cast<std::size_t>(idx)] = p; });
}

bool SawTree::intersect(std::int32_t a, const Frame& fa, std::int32_t b, const Frame& fb,
                        CheckStats* stats) const {
  const Node& na = nodes_[static_cast<std::size_t>(a)];
  const Node& nb = nodes_[static_cast<std::size_t>(b)];
  if (stats) ++stats->box_tests;
  if (disjoint(fa.apply(na.box), fb.apply(nb.box))) return false;
  if (na.n == 1 && nb.n == 1) {
    // Overlapping single-site boxes are the same site.
    if (stats) ++stats->site_comparisons;
    return true;
  }
  // a lies before the pivot and b after it, so recurse into the halves
  // closest to the pivot first: collisions are most likely there.
  if (nb.n == 1 || (na.n > 1 && na.n >= nb.n)) {
    return intersect(na.right, right_frame(fa, na), b, fb, stats) || intersect(na.left, fa, b, fb, stats);
  }
  return intersect(a, fa, nb.left, fb, stats) || intersect(a, fa, nb.right, right_frame(fb, nb), stats);
}

bool SawTree::pieces_intersect(const Path& path, Symmetry g, Point pivot, bool upper_half_plane,
                               CheckStats* stats) const {
  std::array<Piece, kMaxDepth + 1> before;
  std::array<Piece, kMaxDepth> after;
  int n_before = 0;
  int n_after = 0;
  before[static_cast<std::size_t>(n_before++)] = {path.leaf, path.leaf_frame};
  for (int d = path.depth - 1; d >= 0; --d) {
    const auto du = static_cast<std::size_t>(d);
    const Node& nd = nodes_[static_cast<std::size_t>(path.nodes[du])];
    if (path.went_left[du]) {
      const Frame f = right_frame(path.frames[du], nd);
      const Frame moved{pivot + g.apply(f.offset - pivot), g * f.rotation};
      if (upper_half_plane && moved.apply(nodes_[static_cast<std::size_t>(nd.right)].box).ymin < 0) return true;
      after[static_cast<std::size_t>(n_after++)] = {nd.right, moved};
    } else {
      before[static_cast<std::size_t>(n_before++)] = {nd.left, path.frames[du]};
    }
  }
  for (int sum = 0; sum <= n_before + n_after - 2; ++sum) {
    for (int a = std::max(0, sum - n_after + 1); a <= std::min(sum, n_before - 1); ++a) {
      const Piece& pa = before[static_cast<std::size_t>(a)];
      const Piece& pb = after[static_cast<std::size_t>(sum - a)];
      if (intersect(pa.node, pa.frame, pb.node, pb.frame, stats)) return true;
    }
  }
  return false;
}

void SawTree::commit(const Path& path, Symmetry g) {
  for (int d = 0; d < path.depth; ++d) {
    const auto du = static_cast<std::size_t>(d);
    if (!path.went_left[du]) continue;
    const Symmetry t = path.frames[du].rotation;
    Node& nd = nodes_[static_cast<std::size_t>(path.nodes[du])];
    nd.q = t.inverse() * g * t * nd.q;
  }
  for (int d = path.depth - 1; d >= 0; --d) recompute(path.nodes[static_cast<std::size_t>(d)]);
}

bool SawTree::suffix_pivot_is_self_avoiding(int i, Symmetry g, CheckStats* stats) const {
  if (i < 0 || i >= n_sites_) throw std::out_of_range("pivot site");
  if (i == n_sites_ - 1 || g.is_identity()) return true;
  Path path;
  descend(i, path);
  return !pieces_intersect(path, g, path.leaf_frame.apply(kUnit), false, stats);
}

bool SawTree::try_suffix_pivot(int i, Symmetry g, bool upper_half_plane) {
  if (i < 0 || i >= n_sites_) throw std::out_of_range("pivot site");
  if (i == n_sites_ - 1) return true;
  Path path;
  descend(i, path);
  const Point pivot = path.leaf_frame.apply(kUnit);
  if (pieces_intersect(path, g, pivot, upper_half_plane, nullptr)) return false;
  commit(path, g);
  return true;
}

void SawTree::apply_suffix_pivot(int i, Symmetry g) {
  if (i < 0 || i >= n_sites_) throw std::out_of_range("pivot site");
  if (i == n_sites_ - 1) return;
  Path path;
  descend(i, path);
  commit(path, g);
}

void SawTree::move_rigidly(Symmetry g, Point pivot) {
  root_frame_ = {pivot + g.apply(root_frame_.offset - pivot), g * root_frame_.rotation};
}

bool naive_suffix_pivot_is_self_avoiding(std::span<const Point> points, int i, Symmetry g) {
  const auto pi = static_cast<std::size_t>(i);
  if (pi >= points.size()) throw std::out_of_range("pivot site");
  std::unordered_set<Point, PointHash> before(points.begin(), points.begin() + static_cast<std::ptrdiff_t>(pi) + 1);
  const Point pivot = points[pi];
  for (std::size_t k = pi + 1; k < points.size(); ++k) {
    if (before.contains(pivot + g.apply(points[k] - pivot))) return false;
  }
  return true;
}

}  // namespace sawlab
