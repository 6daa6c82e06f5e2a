#include "sawlab/cutcurve.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <thread>

#include <fmt/format.h>
#include "json.hpp"

#include "sawlab/stats.hpp"

namespace sawlab {

namespace {

double polar_deg(double x, double y) {
  double a = std::atan2(y, x) * 180.0 / std::numbers::pi;
  if (a < 0) a += 360.0;
  if (a >= 360.0) a -= 360.0;
  return a;
}

// Lattice-unit curve: radius r = R / delta.
struct CurveGeometry {
  CurveKind kind;
  double r;
  double r2;

  CurveGeometry(const CutCurve& c, double delta) : kind(c.kind), r(c.radius / delta), r2(r * r) {
    if (!(c.radius > 0) || !(delta > 0)) throw std::invalid_argument("curve radius and spacing must be positive");
  }

  bool touches(Point p) const {
    if (kind == CurveKind::semicircle_upper && p.y < 0) return false;
    return std::abs(std::hypot(double(p.x), double(p.y)) - r) <= kTouchTolerance;
  }

  // Appends the intersections of bond (a, b) with the curve.
  void bond_crossings(Point a, Point b, int index, CurveCrossings& out) const {
    const bool horizontal = a.y == b.y;
    const double fixed = horizontal ? a.y : a.x;
    const double lo = horizontal ? std::min(a.x, b.x) : std::min(a.y, b.y);
    const double disc = r2 - fixed * fixed;
    if (disc < 0) return;
    const double root = std::sqrt(disc);
    for (double s : {-root, root}) {
      if (s < lo || s > lo + 1) continue;
      const double x = horizontal ? s : fixed;
      const double y = horizontal ? fixed : s;
      if (kind == CurveKind::semicircle_upper) {
        if (y < 0) continue;
        if (y == 0) out.at_arc_end = true;
      }
      out.crossings.push_back({{x, y}, polar_deg(x, y), index,
                               horizontal ? Orientation::horizontal : Orientation::vertical});
      ++out.count;
    }
  }

  // Whether every point of the box is farther than 1 from the curve.
  bool box_misses_band(const Box& bx) const {
    const double cx = std::clamp(0.0, double(bx.xmin), double(bx.xmax));
    const double cy = std::clamp(0.0, double(bx.ymin), double(bx.ymax));
    const double near2 = cx * cx + cy * cy;
    const double fx = std::max(std::abs(double(bx.xmin)), std::abs(double(bx.xmax)));
    const double fy = std::max(std::abs(double(bx.ymin)), std::abs(double(bx.ymax)));
    const double far2 = fx * fx + fy * fy;
    const double outer = r + 1.0 + 1e-9;
    const double inner = std::max(0.0, r - 1.0 - 1e-9);
    if (near2 > outer * outer) return true;
    if (far2 < inner * inner) return true;
    return kind == CurveKind::semicircle_upper && bx.ymax < -1;
  }
};

}  // namespace

std::string_view to_string(CurveKind k) { return k == CurveKind::circle ? "circle" : "semicircle_upper"; }

CurveCrossings count_curve_crossings(std::span<const Point> points, const CutCurve& curve, double delta) {
  const CurveGeometry g(curve, delta);
  CurveCrossings out;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (g.touches(points[i])) out.degenerate = true;
    if (i + 1 < points.size()) g.bond_crossings(points[i], points[i + 1], static_cast<int>(i), out);
  }
  return out;
}

CurveCrossings count_curve_crossings(const Walk& walk, const CutCurve& curve) {
  return count_curve_crossings(walk.points(), curve, walk.delta());
}

CurveCrossings count_curve_crossings(const SawTree& tree, const CutCurve& curve, double delta) {
  const CurveGeometry g(curve, delta);
  CurveCrossings out;
  int prev_index = -2;
  Point prev{};
  tree.visit_sites([&](const Box& b) { return g.box_misses_band(b); },
                   [&](int idx, Point p) {
                     if (g.touches(p)) out.degenerate = true;
                     if (idx == prev_index + 1) g.bond_crossings(prev, p, prev_index, out);
                     prev_index = idx;
                     prev = p;
                   });
  return out;
}

double CutcurveConfig::delta() const { return std::pow(double(n_steps), -nu); }

std::uint64_t CutcurveResult::examined() const {
  std::uint64_t n = 0;
  for (const auto& c : chains) n += c.examined;
  return n;
}

double CutcurveResult::acceptance_fraction() const {
  const auto n = examined();
  return n ? double(accepted()) / double(n) : 0.0;
}

std::vector<double> CutcurveResult::angles_deg() const {
  std::vector<double> a(samples.size());
  for (std::size_t k = 0; k < a.size(); ++k) a[k] = samples[k].angle_deg;
  return a;
}

std::vector<std::vector<double>> CutcurveResult::batches(int per_chain) const {
  if (per_chain < 1) throw std::invalid_argument("need at least one batch per chain");
  std::vector<std::vector<double>> out(chains.size() * std::size_t(per_chain));
  for (const auto& s : samples) {
    const auto& ch = chains.at(std::size_t(s.chain_id));
    const auto b = ch.examined ? s.sample_index * std::uint64_t(per_chain) / ch.examined : 0;
    out[std::size_t(s.chain_id) * std::size_t(per_chain) + b].push_back(s.angle_deg);
  }
  return out;
}

void CutcurveResult::write_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "chain_id,sample_index,angle_deg,bond_orientation\n";
  for (const auto& s : samples) {
    out << fmt::format("{},{},{:.9f},{}\n", s.chain_id, s.sample_index, s.angle_deg,
                       s.orientation == Orientation::horizontal ? 'h' : 'v');
  }
}

void CutcurveResult::write_json(const std::filesystem::path& path) const {
  nlohmann::json j;
  j["schema"] = "sawlab.cutcurve/1";
  j["acceptance_fraction"] = acceptance_fraction();
  j["n_examined"] = examined();
  j["n_accepted"] = accepted();
  j["config"] = {{"ensemble", to_string(config.ensemble)}, {"curve", to_string(config.curve.kind)},
                 {"radius", config.curve.radius},          {"n_steps", config.n_steps},
                 {"nu", config.nu},                        {"delta", config.delta()},
                 {"n_samples", config.n_samples},          {"stride", config.stride},
                 {"equilibration", config.equilibration},  {"n_chains", config.n_chains},
                 {"seed", config.seed}};
  auto& jc = j["chains"] = nlohmann::json::array();
  std::vector<std::string> warnings;
  for (const auto& c : chains) {
    jc.push_back({{"chain_id", c.chain_id},
                  {"seed", c.seed},
                  {"examined", c.examined},
                  {"accepted", c.accepted},
                  {"degenerate", c.degenerate},
                  {"arc_end", c.arc_end},
                  {"pivots_attempted", c.pivots_attempted},
                  {"pivots_accepted", c.pivots_accepted},
                  {"tau_int_acceptance", c.tau_int_acceptance}});
    if (c.tau_int_acceptance > 2.0) {
      warnings.push_back(fmt::format("chain {}: integrated autocorrelation time {:.2f} samples; consider a larger stride",
                                     c.chain_id, c.tau_int_acceptance));
    }
  }
  j["warnings"] = warnings;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(1) << '\n';
}

namespace {

struct ChainOutput {
  ChainSummary summary;
  std::vector<CrossingSample> samples;
};

ChainOutput run_cutcurve_chain(const CutcurveConfig& cfg, int chain_id, std::uint64_t n_samples) {
  ChainOutput out;
  out.summary.chain_id = chain_id;
  out.summary.seed = derive_seed(cfg.seed, "cutcurve-chain", std::uint64_t(chain_id));
  PivotChain chain(cfg.n_steps, {cfg.ensemble}, out.summary.seed);
  const double delta = cfg.delta();
  std::vector<double> indicator;
  indicator.reserve(n_samples);
  run_chain(chain, {n_samples, cfg.stride, cfg.equilibration}, [&](std::uint64_t s, const PivotChain& c) {
    ++out.summary.examined;
    const auto x = count_curve_crossings(c.tree(), cfg.curve, delta);
    bool keep = false;
    if (x.degenerate) {
      ++out.summary.degenerate;
    } else if (x.count == 1 && x.at_arc_end) {
      ++out.summary.arc_end;
    } else if (x.count == 1) {
      keep = true;
      out.samples.push_back({x.crossings[0].angle_deg, x.crossings[0].orientation, chain_id, s});
    }
    indicator.push_back(keep ? 1.0 : 0.0);
  });
  out.summary.accepted = out.samples.size();
  out.summary.pivots_attempted = chain.attempted();
  out.summary.pivots_accepted = chain.accepted();
  out.summary.tau_int_acceptance = integrated_autocorrelation_time(indicator);
  return out;
}

}  // namespace

CutcurveResult sample_cutcurve(const CutcurveConfig& config) {
  if (config.ensemble == Ensemble::middle_bond_vertical) throw std::invalid_argument("cut-curve needs free or halfplane");
  if ((config.ensemble == Ensemble::upper_half_plane) != (config.curve.kind == CurveKind::semicircle_upper)) {
    throw std::invalid_argument("circle goes with the free ensemble, semicircle with the half-plane");
  }
  if (config.n_chains < 1 || config.n_samples < std::uint64_t(config.n_chains)) {
    throw std::invalid_argument("need at least one sample per chain");
  }
  const auto n_chains = static_cast<std::size_t>(config.n_chains);
  std::vector<ChainOutput> outputs(n_chains);
  auto samples_for = [&](std::size_t c) {
    return config.n_samples / n_chains + (c < config.n_samples % n_chains ? 1 : 0);
  };
  const auto n_threads = static_cast<std::size_t>(std::clamp(config.threads, 1, config.n_chains));
  if (n_threads == 1) {
    for (std::size_t c = 0; c < n_chains; ++c) outputs[c] = run_cutcurve_chain(config, int(c), samples_for(c));
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t c = t; c < n_chains; c += n_threads) outputs[c] = run_cutcurve_chain(config, int(c), samples_for(c));
      });
    }
    for (auto& th : pool) th.join();
  }
  CutcurveResult r;
  r.config = config;
  for (auto& o : outputs) {
    r.chains.push_back(o.summary);
    r.samples.insert(r.samples.end(), o.samples.begin(), o.samples.end());
  }
  return r;
}

}  // namespace sawlab
