#include "sawlab/loop_measure.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <stdexcept>
#include <tuple>

#include <Eigen/Dense>

namespace sawlab {

namespace {

constexpr Point kSteps[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};

bool point_less(Point a, Point b) { return std::tie(a.x, a.y) < std::tie(b.x, b.y); }

Eigen::MatrixXd killed_step_matrix(const FiniteDomain& d) {
  const auto n = static_cast<Eigen::Index>(d.size());
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
  const auto nb = d.neighbours();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int j : nb[std::size_t(i)]) p(i, j) = 0.25;
  }
  return p;
}

Eigen::MatrixXd laplacian_form(const FiniteDomain& d) {
  const auto n = static_cast<Eigen::Index>(d.size());
  return Eigen::MatrixXd::Identity(n, n) - killed_step_matrix(d);
}

double log_det_laplacian(const FiniteDomain& d) {
  if (d.size() == 0) return 0.0;
  const Eigen::LLT<Eigen::MatrixXd> llt(laplacian_form(d));
  if (llt.info() != Eigen::Success) throw std::runtime_error("I - P is not positive definite on this domain");
  const Eigen::MatrixXd& l = llt.matrixLLT();
  double s = 0.0;
  for (Eigen::Index i = 0; i < l.rows(); ++i) s += std::log(l(i, i));
  return 2.0 * s;
}

// Removes site s from the domain of G by a Schur complement; row and column
// s become zero.
void remove_site(std::vector<double>& g, std::size_t n, std::size_t s) {
  const double gss = g[s * n + s];
  std::vector<double> col(n);
  for (std::size_t a = 0; a < n; ++a) col[a] = g[a * n + s];
  for (std::size_t a = 0; a < n; ++a) {
    if (col[a] == 0.0) continue;
    const double f = col[a] / gss;
    for (std::size_t b = 0; b < n; ++b) g[a * n + b] -= f * col[b];
  }
  for (std::size_t a = 0; a < n; ++a) g[a * n + s] = g[s * n + a] = 0.0;
}

}  // namespace

bool ExitEdgeLess::operator()(const ExitEdge& a, const ExitEdge& b) const {
  if (a.first != b.first) return point_less(a.first, b.first);
  return point_less(a.second, b.second);
}

FiniteDomain::FiniteDomain(std::vector<Point> sites, bool require_connected) {
  std::sort(sites.begin(), sites.end(), point_less);
  sites.erase(std::unique(sites.begin(), sites.end()), sites.end());
  sites_ = std::move(sites);
  for (std::size_t i = 0; i < sites_.size(); ++i) index_.emplace(sites_[i], static_cast<int>(i));
  if (require_connected) {
    if (sites_.empty()) throw std::invalid_argument("domain must be non-empty");
    std::vector<char> seen(sites_.size(), 0);
    std::deque<int> queue{0};
    seen[0] = 1;
    std::size_t reached = 1;
    while (!queue.empty()) {
      const Point p = sites_[std::size_t(queue.front())];
      queue.pop_front();
      for (Point s : kSteps) {
        const int j = index_of(p + s);
        if (j >= 0 && !seen[std::size_t(j)]) {
          seen[std::size_t(j)] = 1;
          ++reached;
          queue.push_back(j);
        }
      }
    }
    if (reached != sites_.size()) throw std::invalid_argument("domain interior must be connected");
  }
}

FiniteDomain FiniteDomain::rectangle(int w, int h, int x0, int y0) {
  if (w < 1 || h < 1) throw std::invalid_argument("rectangle sides must be positive");
  std::vector<Point> s;
  for (int x = x0; x < x0 + w; ++x) {
    for (int y = y0; y < y0 + h; ++y) s.push_back({x, y});
  }
  return FiniteDomain(std::move(s));
}

FiniteDomain FiniteDomain::centered_rectangle(int w, int h) { return rectangle(w, h, -(w - 1) / 2, -(h - 1) / 2); }

FiniteDomain FiniteDomain::disc(double radius) { return annulus(0.0, radius); }

FiniteDomain FiniteDomain::annulus(double r_in, double r_out) {
  if (!(r_out > r_in) || r_in < 0) throw std::invalid_argument("annulus needs 0 <= r_in < r_out");
  const int m = static_cast<int>(std::ceil(r_out));
  std::vector<Point> s;
  for (int x = -m; x <= m; ++x) {
    for (int y = -m; y <= m; ++y) {
      const double r = std::hypot(double(x), double(y));
      if (r >= r_in && r < r_out) s.push_back({x, y});
    }
  }
  return FiniteDomain(std::move(s), false);
}

FiniteDomain FiniteDomain::parse(const std::string& text) {
  int w = 0, h = 0, x0 = 0, y0 = 0;
  char tail = 0;
  if (std::sscanf(text.c_str(), "%dx%d@%d,%d%c", &w, &h, &x0, &y0, &tail) == 4) return rectangle(w, h, x0, y0);
  if (std::sscanf(text.c_str(), "%dx%d%c", &w, &h, &tail) == 2) return centered_rectangle(w, h);
  throw std::invalid_argument("domain must look like WxH or WxH@X,Y: " + text);
}

int FiniteDomain::index_of(Point p) const {
  const auto it = index_.find(p);
  return it == index_.end() ? -1 : it->second;
}

std::vector<std::pair<Point, Point>> FiniteDomain::boundary_edges() const {
  std::vector<std::pair<Point, Point>> e;
  for (Point p : sites_) {
    for (Point s : kSteps) {
      if (!contains(p + s)) e.emplace_back(p, p + s);
    }
  }
  std::sort(e.begin(), e.end(), ExitEdgeLess{});
  return e;
}

std::vector<Point> FiniteDomain::boundary() const {
  std::vector<Point> b;
  for (const auto& e : boundary_edges()) b.push_back(e.second);
  std::sort(b.begin(), b.end(), point_less);
  b.erase(std::unique(b.begin(), b.end()), b.end());
  return b;
}

std::vector<std::vector<int>> FiniteDomain::neighbours() const {
  std::vector<std::vector<int>> nb(sites_.size());
  for (std::size_t i = 0; i < sites_.size(); ++i) {
    for (Point s : kSteps) {
      const int j = index_of(sites_[i] + s);
      if (j >= 0) nb[i].push_back(j);
    }
  }
  return nb;
}

FiniteDomain FiniteDomain::without(std::span<const Point> removed) const {
  std::unordered_set<Point, PointHash> drop(removed.begin(), removed.end());
  std::vector<Point> keep;
  for (Point p : sites_) {
    if (!drop.contains(p)) keep.push_back(p);
  }
  return FiniteDomain(std::move(keep), false);
}

FiniteDomain FiniteDomain::united(const FiniteDomain& other) const {
  std::vector<Point> all = sites_;
  for (Point p : other.sites_) {
    if (contains(p)) throw std::invalid_argument("domains overlap");
    all.push_back(p);
  }
  return FiniteDomain(std::move(all), false);
}

LoopMeasureValue loop_measure_in_domain(const FiniteDomain& domain) {
  LoopMeasureValue v;
  v.method = "determinant";
  v.value = -log_det_laplacian(domain);
  return v;
}

double killed_spectral_radius(const FiniteDomain& domain) {
  if (domain.size() == 0) return 0.0;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(killed_step_matrix(domain), Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

LoopMeasureValue loop_measure_truncated(const FiniteDomain& domain, int max_length) {
  if (max_length < 1 || max_length > 31) throw std::invalid_argument("truncation length must be in [1, 31]");
  const std::size_t n = domain.size();
  const auto nb = domain.neighbours();
  // closed[k] = number of closed nearest-neighbour walks of length k in A.
  std::vector<std::uint64_t> closed(std::size_t(max_length) + 1, 0);
  std::vector<std::uint64_t> cur(n), next(n);
  for (std::size_t root = 0; root < n; ++root) {
    std::fill(cur.begin(), cur.end(), 0);
    cur[root] = 1;
    for (int k = 1; k <= max_length; ++k) {
      std::fill(next.begin(), next.end(), 0);
      for (std::size_t a = 0; a < n; ++a) {
        if (!cur[a]) continue;
        for (int b : nb[a]) next[std::size_t(b)] += cur[a];
      }
      std::swap(cur, next);
      closed[std::size_t(k)] += cur[root];
    }
  }
  LoopMeasureValue v;
  v.method = "truncated";
  v.max_length = max_length;
  for (int k = 1; k <= max_length; ++k) v.value += double(closed[std::size_t(k)]) * std::ldexp(1.0, -2 * k) / k;
  // Slack covers the eigensolver's rounding.
  const double rho = std::min(1.0, killed_spectral_radius(domain) + 1e-12);
  const int l1 = max_length + 1;
  v.tail_bound = rho < 1.0 ? double(n) * std::pow(rho, l1) / (l1 * (1.0 - rho)) : INFINITY;
  return v;
}

std::vector<double> green_matrix(const FiniteDomain& domain) {
  const auto n = static_cast<Eigen::Index>(domain.size());
  const Eigen::MatrixXd g = laplacian_form(domain).llt().solve(Eigen::MatrixXd::Identity(n, n));
  std::vector<double> out(std::size_t(n * n));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) out[std::size_t(i * n + j)] = g(i, j);
  }
  return out;
}

double loop_weight_of_walk(const FiniteDomain& domain, std::span<const Point> walk) {
  return log_det_laplacian(domain.without(walk)) - log_det_laplacian(domain);
}

double loop_weight_telescoped(const FiniteDomain& domain, std::span<const Point> walk) {
  const std::size_t n = domain.size();
  std::vector<double> g = green_matrix(domain);
  double total = 0.0;
  for (Point p : walk) {
    const int i = domain.index_of(p);
    if (i < 0) continue;
    const auto s = std::size_t(i);
    if (g[s * n + s] == 0.0) continue;  // already removed
    total += std::log(g[s * n + s]);
    remove_site(g, n, s);
  }
  return total;
}

LambdaPartition lambda_partition_function(const FiniteDomain& domain, double c, double beta, std::size_t max_sites) {
  const std::size_t n = domain.size();
  if (n > max_sites) throw std::invalid_argument("domain too large for exhaustive enumeration");
  const int origin = domain.index_of({0, 0});
  if (origin < 0) throw std::invalid_argument("origin must lie in the domain");
  const auto nb = domain.neighbours();
  const auto& sites = domain.sites();

  LambdaPartition z;
  std::vector<std::vector<double>> greens(n + 1);
  greens[0] = green_matrix(domain);
  std::vector<char> used(n, 0);

  // Walk currently ends at interior site s after `steps` steps, with G of the
  // domain minus the earlier sites at `greens[steps]`.
  auto dfs = [&](auto&& self, std::size_t s, std::size_t steps, double log_loops) -> void {
    const auto& g = greens[steps];
    const double lw = log_loops + std::log(g[s * n + s]);
    const Point p = sites[s];
    const double q = std::pow(beta, double(steps + 1)) * std::exp(-0.5 * c * lw);
    for (Point st : kSteps) {
      if (!domain.contains(p + st)) {
        z.by_edge[{p, p + st}] += q;
        z.total += q;
        ++z.n_walks;
      }
    }
    used[s] = 1;
    greens[steps + 1] = g;
    remove_site(greens[steps + 1], n, s);
    for (int t : nb[s]) {
      if (!used[std::size_t(t)]) self(self, std::size_t(t), steps + 1, lw);
    }
    used[s] = 0;
  };
  dfs(dfs, std::size_t(origin), 0, 0.0);
  return z;
}

EdgeWeights poisson_kernel(const FiniteDomain& domain) {
  const int origin = domain.index_of({0, 0});
  if (origin < 0) throw std::invalid_argument("origin must lie in the domain");
  const auto n = static_cast<Eigen::Index>(domain.size());
  Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
  e(origin) = 1.0;
  const Eigen::VectorXd g = laplacian_form(domain).partialPivLu().solve(e);
  EdgeWeights h;
  for (const auto& edge : domain.boundary_edges()) h[edge] += 0.25 * g(domain.index_of(edge.first));
  return h;
}

std::vector<Point> loop_erase(std::span<const Point> path) {
  std::vector<Point> out;
  std::unordered_map<Point, std::size_t, PointHash> where;
  for (Point p : path) {
    const auto it = where.find(p);
    if (it == where.end()) {
      where.emplace(p, out.size());
      out.push_back(p);
      continue;
    }
    for (std::size_t k = it->second + 1; k < out.size(); ++k) where.erase(out[k]);
    out.resize(it->second + 1);
  }
  return out;
}

std::vector<Point> random_walk_to_exit(const FiniteDomain& domain, Rng& rng) {
  Point p{0, 0};
  if (!domain.contains(p)) throw std::invalid_argument("origin must lie in the domain");
  std::vector<Point> path{p};
  while (domain.contains(p)) {
    p = p + kSteps[uniform_index(rng, 4)];
    path.push_back(p);
  }
  return path;
}

EdgeWeights lerw_endpoint_law(const FiniteDomain& domain, std::uint64_t samples, std::uint64_t seed) {
  if (samples == 0) throw std::invalid_argument("need at least one sample");
  Rng rng = make_rng(derive_seed(seed, "lerw"));
  EdgeWeights law;
  for (const auto& e : domain.boundary_edges()) law[e] = 0.0;
  for (std::uint64_t k = 0; k < samples; ++k) {
    const auto erased = loop_erase(random_walk_to_exit(domain, rng));
    law[{erased[erased.size() - 2], erased.back()}] += 1.0;
  }
  for (auto& [e, w] : law) w /= double(samples);
  return law;
}

CutcurveWeights cutcurve_weights(const FiniteDomain& inner, const FiniteDomain& outer, std::span<const Point> walk,
                                 double c, double beta) {
  if (walk.size() < 2 || walk.front() != Point{0, 0} || !inner.contains(walk.front())) {
    throw std::invalid_argument("walk must start at the origin inside the inner domain");
  }
  CutcurveWeights w;
  for (std::size_t i = 0; i + 1 < walk.size(); ++i) {
    const bool a = inner.contains(walk[i]);
    const bool b = inner.contains(walk[i + 1]);
    if (a == b) continue;
    if (w.crossing_bond >= 0 || !a) throw std::invalid_argument("walk must leave the inner domain exactly once");
    w.crossing_bond = static_cast<int>(i);
  }
  if (w.crossing_bond < 0) throw std::invalid_argument("walk never leaves the inner domain");
  const auto split = std::size_t(w.crossing_bond) + 1;
  const auto head = walk.subspan(0, split);
  const auto tail = walk.subspan(split);
  const FiniteDomain ball = inner.united(outer);
  const double steps = double(walk.size() - 1);
  const double m1 = loop_weight_of_walk(ball, walk);
  const double m2 = loop_weight_of_walk(inner, head) + loop_weight_of_walk(outer, tail);
  w.q1 = std::pow(beta, steps) * std::exp(-0.5 * c * m1);
  w.q2 = std::pow(beta, steps) * std::exp(-0.5 * c * m2);
  return w;
}

}  // namespace sawlab
