// Acceptance run: one PASS/FAIL line per criterion, plus acceptance.json in
// the output directory. Exit status is the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <numbers>
#include <numeric>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "sawlab/correction.hpp"
#include "sawlab/enumerate.hpp"
#include "sawlab/experiment.hpp"
#include "sawlab/loop_measure.hpp"
#include "sawlab/pivot.hpp"
#include "sawlab/rng.hpp"
#include "sawlab/stats.hpp"
#include "sawlab/theory.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sawlab;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Check {
  std::string what;
  bool ok = false;
  std::string detail;
};

struct Report {
  json results = json::array();
  int failures = 0;

  void criterion(int id, const std::string& title, const std::vector<Check>& checks, double runtime_s) {
    bool ok = !checks.empty();
    json cj = json::array();
    for (const auto& c : checks) {
      ok = ok && c.ok;
      cj.push_back({{"check", c.what}, {"pass", c.ok}, {"detail", c.detail}});
    }
    if (!ok) ++failures;
    std::cout << fmt::format("criterion {} {}: {} ({:.1f} s)\n", id, ok ? "PASS" : "FAIL", title, runtime_s);
    for (const auto& c : checks) std::cout << fmt::format("    [{}] {}: {}\n", c.ok ? "ok" : "no", c.what, c.detail);
    std::cout.flush();
    results.push_back({{"criterion", id}, {"title", title}, {"pass", ok}, {"runtime_s", runtime_s}, {"checks", cj}});
  }
};

// ---- 1: exact counts --------------------------------------------------------

void exact_counts(Report& rep) {
  const std::uint64_t expected[] = {4, 12, 36, 100, 284, 780, 2172, 5916, 16268, 44100};
  const auto t0 = Clock::now();
  std::vector<Check> checks;
  bool naive_ok = true, reduced_ok = true;
  std::string naive_s, reduced_s;
  for (int n = 1; n <= 10; ++n) {
    const auto naive = enumerate_saws(n, [](std::span<const Point>) {}).count;
    const auto reduced = count_saws_reduced(n);
    naive_ok = naive_ok && naive == expected[n - 1];
    reduced_ok = reduced_ok && reduced == expected[n - 1];
    naive_s += fmt::format("{}{}", n > 1 ? "," : "", naive);
    reduced_s += fmt::format("{}{}", n > 1 ? "," : "", reduced);
  }
  const double t = seconds_since(t0);
  checks.push_back({"naive enumerator c_1..c_10", naive_ok, naive_s});
  checks.push_back({"symmetry-reduced enumerator c_1..c_10", reduced_ok, reduced_s});
  checks.push_back({"runtime < 10 s", t < 10.0, fmt::format("{:.2f} s", t)});
  rep.criterion(1, "exact SAW counts", checks, t);
}

// ---- 2: chain uniformity -----------------------------------------------------

std::uint64_t step_key(std::span<const Point> pts) {
  std::uint64_t k = 0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const Point d = pts[i + 1] - pts[i];
    const int code = d.x == 1 ? 0 : d.x == -1 ? 1 : d.y == 1 ? 2 : 3;
    k = k * 4 + static_cast<std::uint64_t>(code);
  }
  return k;
}

Check uniformity(Ensemble ens, int n, const std::vector<std::vector<Point>>& states, std::uint64_t seed) {
  constexpr std::uint64_t kAttempts = 10'000'000;
  constexpr std::uint64_t kStride = 50;  // far beyond the autocorrelation time at these lengths
  std::unordered_map<std::uint64_t, std::size_t> index;
  for (std::size_t i = 0; i < states.size(); ++i) index.emplace(step_key(states[i]), i);
  std::vector<std::uint64_t> counts(states.size(), 0);
  std::uint64_t foreign = 0, samples = 0;
  PivotChain chain(n, {ens}, seed);
  chain.advance(1000);
  for (std::uint64_t a = 1; a <= kAttempts; ++a) {
    chain.step();
    if (a % kStride) continue;
    const auto it = index.find(step_key(chain.points()));
    if (it == index.end())
      ++foreign;
    else
      ++counts[it->second];
    ++samples;
  }
  const double expect = static_cast<double>(samples) / static_cast<double>(states.size());
  double chi2 = 0.0;
  for (auto c : counts) chi2 += (static_cast<double>(c) - expect) * (static_cast<double>(c) - expect) / expect;
  const double dof = static_cast<double>(states.size() - 1);
  const double p = chi_square_sf(chi2, dof);
  const bool ok = foreign == 0 && p > 0.01;
  return {fmt::format("{} N={} over {} walks", to_string(ens), n, states.size()), ok,
          fmt::format("{} attempts, {} samples, chi2={:.1f} dof={} p={:.4f}, unknown states={}", kAttempts, samples,
                      chi2, dof, p, foreign)};
}

void chain_uniformity(Report& rep, std::uint64_t seed) {
  const auto t0 = Clock::now();
  std::vector<std::vector<Point>> free6;
  enumerate_saws(6, [&](std::span<const Point> w) { free6.emplace_back(w.begin(), w.end()); });
  std::vector<Check> checks;
  checks.push_back(uniformity(Ensemble::free, 6, free6, derive_seed(seed, "acceptance-uniformity", 0)));
  checks.push_back(uniformity(Ensemble::upper_half_plane, 5, enumerate_halfplane_walks(5),
                              derive_seed(seed, "acceptance-uniformity", 1)));
  checks.push_back(uniformity(Ensemble::middle_bond_vertical, 5, enumerate_midbond_walks(5),
                              derive_seed(seed, "acceptance-uniformity", 2)));
  const double t = seconds_since(t0);
  checks.push_back({"runtime < 5 min", t < 300.0, fmt::format("{:.1f} s", t)});
  rep.criterion(2, "pivot chain uniformity", checks, t);
}

// ---- 3: correction table ------------------------------------------------------

void correction_table(Report& rep, const CorrectionTable& table, double runtime_s, int threads) {
  std::vector<Check> checks;
  const auto l = assemble_l(table);
  const auto& rows = table.rows();

  bool periodic = rows.front().l == rows.back().l;
  for (double th = 0.0; th < 90.0; th += 0.25) {
    const double v = l(th);
    periodic = periodic && l(th + 90.0) == v && l(th + 180.0) == v && l(th + 270.0) == v;
  }
  checks.push_back({"period 90 exact", periodic, "l(theta + 90k) == l(theta) bitwise on a 0.25 deg grid"});

  // l at different angles comes from the same walks, so errors of
  // differences are taken from jackknife replicates, not added in quadrature.
  const std::size_t m = rows.size() - 1;
  const std::size_t nb = table.batches().size();
  std::vector<std::vector<CorrectionRow>> reps;
  for (std::size_t b = 0; b < nb; ++b) reps.push_back(table.without_batch(b).rows());
  auto jackknife = [&](const auto& stat) {
    double mean = 0.0, var = 0.0;
    std::vector<double> v;
    for (const auto& r : reps) v.push_back(stat(r));
    for (double x : v) mean += x / double(nb);
    for (double x : v) var += (x - mean) * (x - mean);
    return std::sqrt(var * double(nb - 1) / double(nb));
  };

  double max_z = 0.0, worst = 0.0, max_z_quad = 0.0;
  for (std::size_t k = 0; k < m / 2; ++k) {
    auto diff = [&](const std::vector<CorrectionRow>& r) { return r[k].l - r[m - k].l; };
    const double s = jackknife(diff);
    const double z = s > 0 ? std::abs(diff(rows)) / s : (diff(rows) == 0 ? 0.0 : INFINITY);
    if (z > max_z) max_z = z, worst = rows[k].theta_deg;
    max_z_quad = std::max(max_z_quad, std::abs(diff(rows)) / std::hypot(rows[k].l_stderr, rows[m - k].l_stderr));
  }
  checks.push_back({"reflection about 45 deg within 3 sigma on every bin", nb > 1 && max_z <= 3.0,
                    fmt::format("max |l(t) - l(90 - t)| / sigma_jackknife = {:.2f} at t = {} over {} pairs "
                                "({:.2f} with errors in quadrature)",
                                max_z, worst, m / 2, max_z_quad)});

  // Shape on the half period: symmetrized l averaged in 5-degree blocks over
  // [0, 45). The period has a single interior extremum when the block means
  // move one way (no reversal beyond 2 sigma) and the total change is large.
  const auto per_block = static_cast<std::size_t>(std::lround(5.0 / table.config().theta_step_deg));
  const std::size_t n_blocks = (m / 2) / per_block;
  auto block = [&](const std::vector<CorrectionRow>& r, std::size_t b) {
    double s = 0.0;
    for (std::size_t k = b * per_block; k < (b + 1) * per_block; ++k) s += 0.5 * (r[k].l + r[m - k].l);
    return s / double(per_block);
  };
  std::vector<double> mean;
  for (std::size_t b = 0; b < n_blocks; ++b) mean.push_back(block(rows, b));
  const double sign = mean.back() < mean.front() ? -1.0 : 1.0;
  double worst_reversal = 0.0;
  for (std::size_t b = 0; b + 1 < n_blocks; ++b) {
    auto step = [&](const std::vector<CorrectionRow>& r) { return block(r, b + 1) - block(r, b); };
    worst_reversal = std::max(worst_reversal, -sign * step(rows) / jackknife(step));
  }
  auto change = [&](const std::vector<CorrectionRow>& r) { return block(r, n_blocks - 1) - block(r, 0); };
  const double drop = std::abs(change(rows)) / jackknife(change);
  const auto argext = std::distance(
      rows.begin(), std::min_element(rows.begin(), rows.end(), [&](const auto& a, const auto& b) {
        return sign * a.l > sign * b.l;
      }));
  std::string blocks;
  for (double v : mean) blocks += fmt::format("{:.4f} ", v);
  checks.push_back({"single interior extremum per period", n_blocks >= 2 && worst_reversal <= 2.0 && drop > 5.0,
                    fmt::format("{} from 0 to 45 deg; block means {}; change {:.1f} sigma; worst reversal {:.2f} "
                                "sigma; raw {} at {} deg",
                                sign < 0 ? "decreasing" : "increasing", blocks, drop, worst_reversal,
                                sign < 0 ? "minimum" : "maximum", rows[std::size_t(argext)].theta_deg)});
  const double limit = threads >= 8 ? 1200.0 : 7200.0;
  checks.push_back({fmt::format("runtime < {:.0f} min on {} thread(s)", limit / 60, threads), runtime_s < limit,
                    fmt::format("{:.1f} s, {} samples at N={}", runtime_s, table.total_samples(),
                                table.config().n_steps)});
  checks.push_back({"no low-confidence bins", !table.has_low_confidence(), ""});
  rep.criterion(3, "correction table l_2", checks, runtime_s);
}

// ---- 4 and 5: cut-curve experiments ------------------------------------------

void cutcurve(Report& rep, int id, const RunConfig& config, const fs::path& out, double acc_lo, double acc_hi,
              double dev_lo, double dev_hi) {
  const auto t0 = Clock::now();
  const auto s = run_experiment(config, out);
  const double t = seconds_since(t0);
  const double reduction = s.max_dev_corrected > 0 ? s.max_dev_uncorrected / s.max_dev_corrected : INFINITY;
  std::vector<Check> checks;
  checks.push_back({fmt::format("acceptance in [{:g}%, {:g}%]", acc_lo * 100, acc_hi * 100),
                    s.acceptance_fraction >= acc_lo && s.acceptance_fraction <= acc_hi,
                    fmt::format("{:.2f}% ({} of {})", 100 * s.acceptance_fraction, s.n_accepted, s.n_examined)});
  checks.push_back({">= 1e5 accepted samples", s.n_accepted >= 100000, fmt::format("{}", s.n_accepted)});
  checks.push_back({fmt::format("uncorrected max |dCDF| in [{:g}%, {:g}%]", dev_lo * 100, dev_hi * 100),
                    s.max_dev_uncorrected >= dev_lo && s.max_dev_uncorrected <= dev_hi,
                    fmt::format("{:.3f}%", 100 * s.max_dev_uncorrected)});
  checks.push_back({"corrected deviation smaller by a factor >= 3", reduction >= 3.0,
                    fmt::format("corrected {:.3f}%, factor {:.2f}", 100 * s.max_dev_corrected, reduction)});
  checks.push_back({"corrected deviation within the 2 sigma band", s.max_dev_corrected <= s.max_band_2sigma,
                    fmt::format("max |dCDF| {:.3f}% vs max band {:.3f}%; pointwise worst {:.2f} band widths",
                                100 * s.max_dev_corrected, 100 * s.max_band_2sigma, s.max_corrected_in_sigma2)});
  checks.push_back({"runtime < 4 h", t < 4 * 3600.0, fmt::format("{:.0f} s on {} thread(s)", t, config.threads)});
  rep.criterion(id, fmt::format("cut-curve {}", to_string(config.geometry)), checks, t);
}

// ---- 6: theory -----------------------------------------------------------------

void theory(Report& rep, const CorrectionTable& table) {
  const auto t0 = Clock::now();
  std::vector<Check> checks;
  const auto e = exponents_from_charge(0.0);
  checks.push_back({"kappa(c=0) = 8/3", e.kappa == 8.0 / 3.0, fmt::format("{:.17g}", e.kappa)});
  checks.push_back({"b = 5/8, b~ = 5/48", e.b == 5.0 / 8.0 && e.b_tilde == 5.0 / 48.0,
                    fmt::format("{:.17g}, {:.17g}", e.b, e.b_tilde)});

  const BoundaryDensity semi(Geometry::halfplane_semicircle);
  const double half = semi.cdf(90.0);
  checks.push_back({"semicircle CDF(90) = 0.5 to 1e-10", std::abs(half - 0.5) <= 1e-10,
                    fmt::format("|CDF(90) - 0.5| = {:.2e}", std::abs(half - 0.5))});

  const auto l = LatticeCorrection::from_table(table);
  double worst = 0.0;
  for (auto g : {Geometry::disc_center, Geometry::halfplane_semicircle}) {
    for (bool corrected : {false, true}) {
      const std::optional<LatticeCorrection> c = corrected ? std::optional(l) : std::nullopt;
      const BoundaryDensity gk(g, c, 5.0 / 8.0, QuadratureRule::gauss_kronrod);
      const BoundaryDensity ts(g, c, 5.0 / 8.0, QuadratureRule::tanh_sinh);
      for (double th = 0.0; th <= gk.range_hi(); th += 0.1) worst = std::max(worst, std::abs(gk.cdf(th) - ts.cdf(th)));
    }
  }
  checks.push_back({"Gauss-Kronrod vs tanh-sinh CDF <= 1e-8", worst <= 1e-8,
                    fmt::format("max diff {:.2e} over both geometries, with and without l_2", worst)});

  std::vector<double> grid, flat, gp, target;
  for (int k = 1; k < 1800; ++k) {
    grid.push_back(k * 0.1);
    flat.push_back(1.0);
    gp.push_back(joukowski_gprime(k * 0.1));
    target.push_back(std::pow(std::sin(k * 0.1 * std::numbers::pi / 180.0), 5.0 / 8.0));
  }
  const auto d = conformal_covariance_check(grid, flat, gp, 5.0 / 8.0);
  const auto tn = conformal_covariance_check(grid, target, std::vector<double>(grid.size(), 1.0), 5.0 / 8.0);
  double rel = 0.0;
  for (std::size_t k = 0; k < d.size(); ++k) rel = std::max(rel, std::abs(d[k] / tn[k] - 1.0));
  checks.push_back({"z + 1/z covariance gives the sin^(5/8) interior density", rel <= 1e-10,
                    fmt::format("max relative deviation {:.2e}", rel)});
  rep.criterion(6, "theory", checks, seconds_since(t0));
}

// ---- 7: loop measure and LERW -------------------------------------------------

void loop_measure(Report& rep, std::uint64_t seed) {
  const auto t0 = Clock::now();
  std::vector<Check> checks;

  // Every connected subset of the 3x3 box.
  int domains = 0;
  double worst_ratio = 0.0;
  bool within = true;
  for (unsigned mask = 1; mask < 512; ++mask) {
    std::vector<Point> sites;
    for (int b = 0; b < 9; ++b)
      if (mask >> b & 1u) sites.push_back({b % 3, b / 3});
    std::optional<FiniteDomain> d;
    try {
      d.emplace(sites);
    } catch (const std::invalid_argument&) {
      continue;  // not connected
    }
    ++domains;
    const auto exact = loop_measure_in_domain(*d);
    const auto trunc = loop_measure_truncated(*d, 14);
    const double gap = exact.value - trunc.value;
    within = within && gap >= -1e-14 && gap <= trunc.tail_bound;
    worst_ratio = std::max(worst_ratio, gap / trunc.tail_bound);
  }
  checks.push_back({"determinant vs truncated (L=14) within tail bound", within && domains > 0,
                    fmt::format("{} connected domains in the 3x3 box; max gap / bound = {:.3f}", domains,
                                worst_ratio)});

  for (int w : {4, 5}) {
    const auto d = FiniteDomain::centered_rectangle(w, w);
    const auto z = lambda_partition_function(d, -2.0, 0.25);
    const auto pk = poisson_kernel(d);
    double diff = 0.0;
    bool same_edges = z.by_edge.size() == pk.size();
    for (const auto& [edge, v] : pk) {
      const auto it = z.by_edge.find(edge);
      if (it == z.by_edge.end()) {
        same_edges = false;
        continue;
      }
      diff = std::max(diff, std::abs(it->second - v));
    }
    checks.push_back({fmt::format("c=-2, beta=1/4 partition function = Poisson kernel on {0}x{0}", w),
                      same_edges && diff <= 1e-10,
                      fmt::format("{} walks, {} exit edges, max |diff| = {:.2e}", z.n_walks, pk.size(), diff)});
  }

  const auto d5 = FiniteDomain::centered_rectangle(5, 5);
  const auto pk = poisson_kernel(d5);
  const auto law = lerw_endpoint_law(d5, 1'000'000, derive_seed(seed, "acceptance-lerw"));
  double tv = 0.0, seen = 0.0;
  for (const auto& [edge, v] : pk) {
    const auto it = law.find(edge);
    const double emp = it == law.end() ? 0.0 : it->second;
    seen += emp;
    tv += 0.5 * std::abs(emp - v);
  }
  tv += 0.5 * std::max(0.0, 1.0 - seen);  // mass on edges outside the kernel's support
  checks.push_back({"LERW endpoint law vs Poisson kernel, TV < 0.01 (1e6 walks, 5x5)", tv < 0.01,
                    fmt::format("TV = {:.5f}", tv)});
  const double t = seconds_since(t0);
  checks.push_back({"runtime < 30 min", t < 1800.0, fmt::format("{:.1f} s", t)});
  rep.criterion(7, "loop measure and LERW", checks, t);
}

// ---- 8: determinism ---------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void determinism(Report& rep, const fs::path& out, std::uint64_t seed) {
  const auto t0 = Clock::now();
  std::vector<Check> checks;
  for (auto g : {ExperimentGeometry::circle, ExperimentGeometry::semicircle}) {
    RunConfig c;
    c.name = "rerun";
    c.seed = seed;
    c.geometry = g;
    c.correction.n_steps = 31;
    c.correction.n_samples = 20000;
    c.cutcurve.n_steps = 2000;
    c.cutcurve.n_samples = 4000;
    c.cutcurve.n_chains = 2;
    c.cutcurve.batches_per_chain = 4;
    const auto base = out / fmt::format("rerun_{}", to_string(g));
    fs::remove_all(base);
    run_experiment(c, base / "a");
    run_experiment(c, base / "b");
    c.threads = 2;
    run_experiment(c, base / "c");
    int files = 0, differ = 0, thread_differ = 0;
    for (const auto& entry : fs::directory_iterator(base / "a")) {
      const auto name = entry.path().filename();
      if (name == "timing.json") continue;
      ++files;
      const auto bytes = slurp(entry.path());
      if (bytes != slurp(base / "b" / name)) ++differ;
      // The manifest and summary echo the thread count; the data files must not move.
      if (name != "manifest.json" && name != "summary.json" && bytes != slurp(base / "c" / name)) ++thread_differ;
    }
    checks.push_back({fmt::format("{} pipeline rerun byte-identical", to_string(g)), files > 0 && differ == 0,
                      fmt::format("{} files compared, {} differ", files, differ)});
    checks.push_back({fmt::format("{} data files independent of thread count", to_string(g)), thread_differ == 0,
                      fmt::format("{} differ between 1 and 2 threads", thread_differ)});
  }
  rep.criterion(8, "determinism", checks, seconds_since(t0));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance run: criteria 1-8"};
  std::string configs = "configs";
  std::string out_dir = "acceptance_out";
  std::uint64_t seed = 1;
  int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  app.add_option("--configs", configs, "Directory holding circle.json and semicircle.json");
  app.add_option("--out-dir", out_dir, "Where runs are written");
  app.add_option("--seed", seed, "Seed for criteria that are not driven by a run file");
  app.add_option("--threads", threads, "Worker threads for the long runs")->check(CLI::PositiveNumber);
  std::string table_path;
  app.add_option("--table", table_path,
                 "Correction table written by an earlier criterion-3 run (criterion 3 itself always estimates)");
  std::vector<int> only;
  app.add_option("--only", only, "Run just these criteria")->check(CLI::Range(1, 8));
  CLI11_PARSE(app, argc, argv);
  auto wanted = [&](int id) { return only.empty() || std::find(only.begin(), only.end(), id) != only.end(); };

  try {
    const fs::path out(out_dir);
    fs::create_directories(out);
    auto circle = RunConfig::read(fs::path(configs) / "circle.json");
    auto semi = RunConfig::read(fs::path(configs) / "semicircle.json");
    circle.threads = semi.threads = threads;

    Report rep;
    std::cout << fmt::format("sawlab {} acceptance, {} thread(s)\n", version(), threads);
    if (wanted(1)) exact_counts(rep);
    if (wanted(2)) chain_uniformity(rep, seed);

    // One table, estimated from the circle run file, serves criteria 3 to 6.
    if (wanted(3) || wanted(4) || wanted(5) || wanted(6)) {
      auto cc = circle.correction_config();
      cc.threads = threads;
      fs::path table_file = out / "correction.json";
      CorrectionTable table;
      if (wanted(3) || table_path.empty()) {
        const auto t0 = Clock::now();
        table = estimate_p2(cc);
        const double table_s = seconds_since(t0);
        table.write_json(table_file);
        table.write_csv(out / "correction.csv");
        if (wanted(3)) correction_table(rep, table, table_s, threads);
      } else {
        table_file = table_path;
        table = CorrectionTable::read_json(table_file);
        const auto& tc = table.config();
        if (tc.seed != cc.seed || tc.n_steps != cc.n_steps || tc.n_samples != cc.n_samples ||
            tc.sampling != cc.sampling || tc.theta_step_deg != cc.theta_step_deg) {
          throw std::runtime_error(table_file.string() + " was not produced by the circle run file");
        }
      }

      for (auto* run : {&circle, &semi}) {
        run->correction.source = "file";
        run->correction.path = table_file.string();
      }
      if (wanted(4)) cutcurve(rep, 4, circle, out / "circle", 0.05, 0.20, 0.008, 0.03);
      if (wanted(5)) cutcurve(rep, 5, semi, out / "semicircle", 0.07, 0.25, 0.007, 0.03);
      if (wanted(6)) theory(rep, table);
    }
    if (wanted(7)) loop_measure(rep, seed);
    if (wanted(8)) determinism(rep, out, seed);

    std::string report = "acceptance";
    for (int id : only) report += fmt::format("_{}", id);
    std::ofstream(out / (report + ".json")) << json{{"criteria", rep.results}, {"failures", rep.failures}}.dump(1)
                                           << '\n';
    const auto ran = rep.results.size();
    std::cout << fmt::format("{} of {} criteria passed\n", ran - std::size_t(rep.failures), ran);
    return rep.failures;
  } catch (const std::exception& e) {
    std::cerr << "acceptance run aborted: " << e.what() << '\n';
    return 100;
  }
}
