#include <chrono>
#include <cmath>
#include <map>

#include "doctest.h"
#include "sawlab/enumerate.hpp"
#include "sawlab/pivot.hpp"
#include "support.hpp"

using namespace sawlab;

namespace {

using Key = std::vector<std::pair<int, int>>;

Key key_of(std::span<const Point> pts) {
  Key k;
  k.reserve(pts.size());
  for (Point p : pts) k.emplace_back(p.x, p.y);
  return k;
}

std::vector<std::vector<Point>> ensemble_states(int n, Ensemble kind) {
  switch (kind) {
    case Ensemble::free: {
      std::vector<std::vector<Point>> out;
      enumerate_saws(n, [&](std::span<const Point> p) { out.emplace_back(p.begin(), p.end()); });
      return out;
    }
    case Ensemble::upper_half_plane: return enumerate_halfplane_walks(n);
    case Ensemble::middle_bond_vertical: return enumerate_midbond_walks(n);
  }
  return {};
}

std::vector<PivotProposal> all_proposals(int n, Ensemble kind) {
  std::vector<PivotProposal> out;
  for (int g = 1; g < 8; ++g) {
    if (kind == Ensemble::middle_bond_vertical) {
      const int half = (n - 1) / 2;
      for (int s = 1; s <= half; ++s) out.push_back({s, Symmetry::from_index(g), true});
      for (int s = half + 1; s <= 2 * half; ++s) out.push_back({s, Symmetry::from_index(g), false});
    } else {
      for (int s = 0; s < n; ++s) out.push_back({s, Symmetry::from_index(g), false});
    }
  }
  return out;
}

double chi_square_z(const std::map<Key, std::uint64_t>& counts, std::size_t n_states, std::uint64_t n_samples) {
  const double expected = static_cast<double>(n_samples) / static_cast<double>(n_states);
  double chi2 = 0.0;
  for (const auto& [k, c] : counts) chi2 += (double(c) - expected) * (double(c) - expected) / expected;
  chi2 += static_cast<double>(n_states - counts.size()) * expected;
  const double df = static_cast<double>(n_states - 1);
  return (chi2 - df) / std::sqrt(2 * df);
}

}  // namespace

TEST_CASE("tree reproduces the walk it was built from") {
  Rng rng = make_rng(1);
  for (int n : {1, 2, 3, 7, 64, 333}) {
    const auto pts = testing::grow_random_saw(rng, n);
    const SawTree tree(pts);
    CHECK(tree.points() == pts);
    CHECK(tree.site(n) == pts.back());
    Box b{pts[0].x, pts[0].x, pts[0].y, pts[0].y};
    for (Point p : pts) b = merge(b, {p.x, p.x, p.y, p.y});
    CHECK(tree.bounding_box() == b);
  }
  CHECK_THROWS(SawTree(std::vector<Point>{{0, 0}}));
  CHECK_THROWS(SawTree(std::vector<Point>{{0, 0}, {1, 0}, {0, 0}}));
}

TEST_CASE("pivot examples") {
  SawTree rod = SawTree::straight(10);
  REQUIRE(rod.try_suffix_pivot(5, Symmetry::rotation90()));
  const auto pts = rod.points();
  CHECK(pts[5] == Point{5, 0});
  CHECK(pts[6] == Point{5, 1});
  CHECK(pts[10] == Point{5, 5});

  // Folding a U shape back onto itself collides.
  const std::vector<Point> u{{0, 0}, {1, 0}, {2, 0}, {2, 1}, {1, 1}, {0, 1}};
  SawTree tu(u);
  CHECK_FALSE(tu.try_suffix_pivot(1, Symmetry::from_index(5)));
  CHECK(tu.points() == u);
}

TEST_CASE("disjoint boxes are rejected without comparing sites") {
  const SawTree rod = SawTree::straight(1000);
  CheckStats stats;
  CHECK(rod.suffix_pivot_is_self_avoiding(500, Symmetry::rotation90(), &stats));
  CHECK(stats.site_comparisons == 0);
  CHECK(stats.box_tests > 0);
}

TEST_CASE("fast and naive self-avoidance checks agree") {
  Rng rng = make_rng(2024);
  PivotChain chain(1000, {Ensemble::free}, 99);
  chain.advance(20000);
  int accepted = 0;
  for (int trial = 0; trial < 100000; ++trial) {
    if (trial % 1000 == 0) chain.advance(2000);
    const int i = static_cast<int>(uniform_index(rng, 1001));
    const Symmetry g = Symmetry::from_index(static_cast<int>(uniform_index(rng, 8)));
    const bool fast = chain.tree().suffix_pivot_is_self_avoiding(i, g);
    const auto pts = chain.points();
    const bool slow = naive_suffix_pivot_is_self_avoiding(pts, i, g);
    CHECK(fast == slow);
    accepted += fast;
  }
  CHECK(accepted > 10000);
  CHECK(accepted < 90000);
}

TEST_CASE("tree and naive chains follow identical trajectories") {
  for (Ensemble kind : {Ensemble::free, Ensemble::upper_half_plane, Ensemble::middle_bond_vertical}) {
    CAPTURE(to_string(kind));
    PivotChain fast(51, {kind}, 12345);
    NaivePivotChain slow(51, {kind}, 12345);
    for (int k = 0; k < 20000; ++k) {
      const bool a = fast.step();
      const bool b = slow.step();
      REQUIRE(a == b);
      if (k % 97 == 0) REQUIRE(fast.points() == std::vector<Point>(slow.points().begin(), slow.points().end()));
    }
    CHECK(fast.accepted() == slow.accepted());
    CHECK(fast.accepted() > 1000);
  }
}

TEST_CASE("chains stay inside their ensemble") {
  for (Ensemble kind : {Ensemble::free, Ensemble::upper_half_plane, Ensemble::middle_bond_vertical}) {
    CAPTURE(to_string(kind));
    PivotChain chain(201, {kind}, 7);
    for (int k = 0; k < 300; ++k) {
      chain.advance(50);
      REQUIRE(chain.constraint().admits(chain.points()));
    }
  }
  CHECK_THROWS(PivotChain(10, {Ensemble::middle_bond_vertical}, 1));
  CHECK_THROWS(PivotChain(std::vector<Point>{{0, 0}, {0, -1}}, {Ensemble::upper_half_plane}, 1));
}

TEST_CASE("transition kernel is symmetric on every small ensemble") {
  for (auto [kind, n] : {std::pair{Ensemble::free, 5}, std::pair{Ensemble::upper_half_plane, 5},
                         std::pair{Ensemble::middle_bond_vertical, 5}}) {
    CAPTURE(to_string(kind));
    const auto states = ensemble_states(n, kind);
    std::map<Key, std::size_t> index;
    for (std::size_t s = 0; s < states.size(); ++s) index.emplace(key_of(states[s]), s);
    REQUIRE(index.size() == states.size());
    std::map<std::pair<std::size_t, std::size_t>, int> moves;
    const auto proposals = all_proposals(n, kind);
    for (std::size_t s = 0; s < states.size(); ++s) {
      for (const auto& p : proposals) {
        PivotChain chain(states[s], {kind}, 0);
        chain.attempt(p);
        const auto it = index.find(key_of(chain.points()));
        REQUIRE(it != index.end());
        ++moves[{s, it->second}];
      }
    }
    for (const auto& [edge, count] : moves) {
      const auto back = moves.find({edge.second, edge.first});
      REQUIRE(back != moves.end());
      CHECK(back->second == count);
    }
    // Irreducibility: a breadth-first search from the first state reaches all.
    std::vector<bool> seen(states.size());
    std::vector<std::size_t> queue{0};
    seen[0] = true;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      for (auto it = moves.lower_bound({queue[head], 0}); it != moves.end() && it->first.first == queue[head]; ++it) {
        if (!seen[it->first.second]) {
          seen[it->first.second] = true;
          queue.push_back(it->first.second);
        }
      }
    }
    CHECK(queue.size() == states.size());
  }
}

TEST_CASE("sampled walks are uniform on small ensembles") {
  for (auto [kind, n] : {std::pair{Ensemble::free, 5}, std::pair{Ensemble::upper_half_plane, 5},
                         std::pair{Ensemble::middle_bond_vertical, 5}}) {
    CAPTURE(to_string(kind));
    const auto n_states = ensemble_states(n, kind).size();
    PivotChain chain(n, {kind}, 31 + static_cast<int>(kind));
    std::map<Key, std::uint64_t> counts;
    const std::uint64_t samples = 200000;
    run_chain(chain, {samples, 10, -1}, [&](std::uint64_t, const PivotChain& c) { ++counts[key_of(c.points())]; });
    CHECK(counts.size() == n_states);
    CHECK(std::abs(chi_square_z(counts, n_states, samples)) < 4.0);
  }
}

TEST_CASE("sampling schedule") {
  PivotChain chain(20, {Ensemble::free}, 5);
  std::uint64_t calls = 0;
  run_chain(chain, {7, 3, 11}, [&](std::uint64_t idx, const PivotChain& c) {
    CHECK(idx == calls);
    CHECK(c.attempted() == 11 + 3 * (calls + 1));
    ++calls;
  });
  CHECK(calls == 7);
  CHECK(equilibration_attempts({1, 1, -1}, 50) == 1000);
  CHECK_THROWS(run_chain(chain, {1, 0, 0}, [](std::uint64_t, const PivotChain&) {}));
  const auto walks = run_chain(initial_walk(9, Ensemble::middle_bond_vertical), {Ensemble::middle_bond_vertical},
                               {5, 4, 0}, 3);
  CHECK(walks.size() == 5);
}

TEST_CASE("mean-square end-to-end distance grows like N^(3/2)") {
  std::vector<double> log_n;
  std::vector<double> log_r2;
  for (int n : {250, 500, 1000}) {
    PivotChain chain(n, {Ensemble::free}, 2000 + n);
    double sum = 0.0;
    const std::uint64_t samples = 20000;
    run_chain(chain, {samples, 50, -1}, [&](std::uint64_t, const PivotChain& c) {
      const Point e = c.tree().site(n);
      sum += double(norm2(e));
    });
    log_n.push_back(std::log(double(n)));
    log_r2.push_back(std::log(sum / double(samples)));
  }
  const double mx = (log_n[0] + log_n[1] + log_n[2]) / 3;
  const double my = (log_r2[0] + log_r2[1] + log_r2[2]) / 3;
  double sxy = 0.0;
  double sxx = 0.0;
  for (int k = 0; k < 3; ++k) {
    sxy += (log_n[k] - mx) * (log_r2[k] - my);
    sxx += (log_n[k] - mx) * (log_n[k] - mx);
  }
  CHECK(sxy / sxx == doctest::Approx(1.5).epsilon(0.05 / 1.5));
}

TEST_CASE("tree pivots are much faster than hash-set pivots at N = 1e5" * doctest::description("benchmark")) {
  using clock = std::chrono::steady_clock;
  const int n = 100000;
  PivotChain fast(n, {Ensemble::free}, 77);
  NaivePivotChain slow(n, {Ensemble::free}, 77);
  fast.advance(20000);
  auto t0 = clock::now();
  const int fast_attempts = 20000;
  fast.advance(fast_attempts);
  const double fast_per = std::chrono::duration<double>(clock::now() - t0).count() / fast_attempts;
  t0 = clock::now();
  const int slow_attempts = 100;
  for (int k = 0; k < slow_attempts; ++k) slow.step();
  const double slow_per = std::chrono::duration<double>(clock::now() - t0).count() / slow_attempts;
  MESSAGE("tree " << fast_per * 1e6 << " us/attempt, naive " << slow_per * 1e6 << " us/attempt");
  CHECK(slow_per > 10 * fast_per);
}
