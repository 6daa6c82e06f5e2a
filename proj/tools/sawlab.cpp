// Umbrella command line for the library. Exit codes: 0 success, 2 bad
// configuration or arguments, 3 a stage failed while running.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "sawlab/correction.hpp"
#include "sawlab/cutcurve.hpp"
#include "sawlab/enumerate.hpp"
#include "sawlab/experiment.hpp"
#include "sawlab/loop_measure.hpp"
#include "sawlab/pivot.hpp"
#include "sawlab/theory.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sawlab;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitStage = 3;

struct Globals {
  std::string config_path;
  std::uint64_t seed = 1;
  int threads = 1;
  std::string out_dir = ".";
  CLI::Option* seed_opt = nullptr;
  CLI::Option* threads_opt = nullptr;
  std::optional<RunConfig> config;

  fs::path output(const std::string& name) const { return fs::path(out_dir) / name; }

  void load() {
    if (!config_path.empty()) config = RunConfig::read(config_path);
    if (config && !seed_opt->count()) seed = config->seed;
    if (config && !threads_opt->count()) threads = config->threads;
  }
};

void write_json(const fs::path& p, const json& j) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << j.dump(1) << '\n';
}

void ensure_parent(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

// ---- enumerate -------------------------------------------------------------

struct EnumerateArgs {
  int n = 10;
  int cap = kDefaultEnumerationCap;
  bool naive = false;
  std::optional<double> line_theta;
  std::optional<double> line_l;
  std::string out = "enumerate.json";
};

void run_enumerate(const Globals& g, const EnumerateArgs& a) {
  if (a.line_theta.has_value() != a.line_l.has_value()) {
    throw std::invalid_argument("--line-theta and --line-l go together");
  }
  json j;
  j["n"] = a.n;
  j["method"] = a.naive ? "naive" : "symmetry_reduced";
  std::vector<std::uint64_t> counts;
  for (int k = 1; k <= a.n; ++k) {
    EnumerateOptions opt;
    opt.cap = a.cap;
    opt.threads = g.threads;
    counts.push_back(a.naive ? enumerate_saws(k, nullptr, opt).count : count_saws_reduced(k, a.cap));
  }
  j["c_n"] = counts;
  std::vector<double> dc(counts.begin(), counts.end());
  const auto mu = estimate_mu(dc);
  j["mu_ratio_estimates"] = mu.ratios;
  j["mu_root_estimates"] = mu.roots;
  if (a.line_theta) {
    const double theta = *a.line_theta * std::numbers::pi / 180.0;
    const std::vector<double> grid{*a.line_l};
    json fr = json::array();
    for (int k = 1; k <= a.n; ++k) {
      const auto t = exact_line_survival(k, theta, grid, a.cap);
      if (t.rows.empty()) {
        fr.push_back(nullptr);  // a reachable site lies on the line
      } else {
        fr.push_back(t.rows[0].fraction());
      }
    }
    j["line"] = {{"theta_deg", *a.line_theta}, {"l", *a.line_l}};
    j["survival_fractions"] = fr;
  }
  write_json(g.output(a.out), j);
  std::cout << j.dump() << '\n';
}

// ---- pivot -----------------------------------------------------------------

struct PivotArgs {
  int n = 1000;
  std::string ensemble = "free";
  std::uint64_t samples = 1000;
  std::uint64_t stride = 100;
  std::int64_t equilibration = -1;
  int chains = 1;
  std::string observables = "r2,rg2,x_end,y_end";
  std::string out = "pivot.csv";
};

void run_pivot(const Globals& g, const PivotArgs& a) {
  const Ensemble ens = parse_ensemble(a.ensemble);
  std::vector<std::string> obs;
  {
    std::stringstream ss(a.observables);
    for (std::string tok; std::getline(ss, tok, ',');) {
      if (tok != "r2" && tok != "rg2" && tok != "x_end" && tok != "y_end") {
        throw std::invalid_argument("unknown observable '" + tok + "' (r2, rg2, x_end, y_end)");
      }
      obs.push_back(tok);
    }
  }
  if (a.chains < 1) throw std::invalid_argument("--chains must be >= 1");
  const fs::path path = g.output(a.out);
  ensure_parent(path);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "sample_index,chain_id";
  for (const auto& o : obs) out << ',' << o;
  out << '\n';
  json summary = json::array();
  std::vector<Point> pts;
  for (int c = 0; c < a.chains; ++c) {
    PivotChain chain(a.n, {ens}, derive_seed(g.seed, "pivot-chain", std::uint64_t(c)));
    run_chain(chain, {a.samples, a.stride, a.equilibration}, [&](std::uint64_t s, const PivotChain& ch) {
      ch.tree().materialize(pts);
      double cx = 0, cy = 0;
      for (Point p : pts) {
        cx += p.x;
        cy += p.y;
      }
      cx /= double(pts.size());
      cy /= double(pts.size());
      out << s << ',' << c;
      for (const auto& o : obs) {
        if (o == "r2") {
          out << ',' << norm2(pts.back() - pts.front());
        } else if (o == "rg2") {
          double rg = 0;
          for (Point p : pts) rg += (p.x - cx) * (p.x - cx) + (p.y - cy) * (p.y - cy);
          out << ',' << fmt::format("{:.10g}", rg / double(pts.size()));
        } else if (o == "x_end") {
          out << ',' << pts.back().x;
        } else {
          out << ',' << pts.back().y;
        }
      }
      out << '\n';
    });
    summary.push_back({{"chain_id", c},
                       {"seed", chain.seed()},
                       {"attempted", chain.attempted()},
                       {"accepted", chain.accepted()}});
  }
  std::cout << json{{"ensemble", to_string(ens)}, {"n", a.n}, {"chains", summary}}.dump() << '\n';
}

// ---- correction ------------------------------------------------------------

struct CorrectionArgs {
  int which = 2;
  int n = 101;
  std::uint64_t samples = 100000;
  std::uint64_t stride = 10;
  std::int64_t equilibration = -1;
  double theta_step = 1.0;
  int chains = 4;
  int batches = 25;
  std::string sampling = "uniform_draw";
  std::string out = "correction.csv";
  CLI::App* cmd = nullptr;
};

void run_correction(const Globals& g, CorrectionArgs a) {
  if (g.config) {
    // Run-file values apply unless given on the command line.
    const auto& c = g.config->correction;
    auto unset = [&](const char* name) { return a.cmd->get_option(name)->count() == 0; };
    if (unset("--n")) a.n = c.n_steps;
    if (unset("--samples")) a.samples = c.n_samples;
    if (unset("--stride")) a.stride = c.stride;
    if (unset("--equilibration")) a.equilibration = c.equilibration;
    if (unset("--theta-step")) a.theta_step = c.theta_step_deg;
    if (unset("--chains")) a.chains = c.n_chains;
    if (unset("--batches")) a.batches = c.batches_per_chain;
    if (unset("--sampling")) a.sampling = std::string(to_string(c.sampling));
  }
  CorrectionConfig cfg;
  cfg.which = a.which == 1 ? CorrectionKind::stopped : CorrectionKind::cut_curve;
  cfg.n_steps = a.n;
  cfg.n_samples = a.samples;
  cfg.stride = a.stride;
  cfg.equilibration = a.equilibration;
  cfg.theta_step_deg = a.theta_step;
  cfg.n_chains = a.chains;
  cfg.batches_per_chain = a.batches;
  cfg.threads = g.threads;
  cfg.seed = g.seed;
  cfg.sampling = parse_l_sampling(a.sampling);
  const auto table = estimate_correction(cfg);
  const fs::path csv = g.output(a.out);
  ensure_parent(csv);
  table.write_csv(csv);
  fs::path side = csv;
  side.replace_extension(".json");
  table.write_json(side);
  std::cout << json{{"csv", csv.string()},
                    {"json", side.string()},
                    {"samples", table.total_samples()},
                    {"low_confidence", table.has_low_confidence()}}
                   .dump()
            << '\n';
}

// ---- cutcurve --------------------------------------------------------------

struct CutcurveArgs {
  std::string geometry = "disc";
  double radius = 0.2;
  int n = 30000;
  double nu = 0.75;
  std::uint64_t samples = 100000;
  std::uint64_t stride = 200;
  std::int64_t equilibration = -1;
  int chains = 4;
  std::string out = "cutcurve_samples.csv";
  CLI::App* cmd = nullptr;
};

void run_cutcurve(const Globals& g, CutcurveArgs a) {
  ExperimentGeometry geom = parse_geometry(a.geometry);
  if (g.config) {
    const auto& c = g.config->cutcurve;
    auto unset = [&](const char* name) { return a.cmd->get_option(name)->count() == 0; };
    if (unset("--geometry")) geom = g.config->geometry;
    if (unset("--R")) a.radius = c.radius;
    if (unset("--n")) a.n = c.n_steps;
    if (unset("--nu")) a.nu = c.nu;
    if (unset("--samples")) a.samples = c.n_samples;
    if (unset("--stride")) a.stride = c.stride;
    if (unset("--equilibration")) a.equilibration = c.equilibration;
    if (unset("--chains")) a.chains = c.n_chains;
  }
  CutcurveConfig cfg;
  const bool circle = geom == ExperimentGeometry::circle;
  cfg.ensemble = circle ? Ensemble::free : Ensemble::upper_half_plane;
  cfg.curve = {circle ? CurveKind::circle : CurveKind::semicircle_upper, a.radius};
  cfg.n_steps = a.n;
  cfg.nu = a.nu;
  cfg.n_samples = a.samples;
  cfg.stride = a.stride;
  cfg.equilibration = a.equilibration;
  cfg.n_chains = a.chains;
  cfg.threads = g.threads;
  cfg.seed = g.seed;
  const auto r = sample_cutcurve(cfg);
  const fs::path csv = g.output(a.out);
  ensure_parent(csv);
  r.write_csv(csv);
  fs::path side = csv;
  side.replace_extension(".json");
  r.write_json(side);
  std::cout << json{{"csv", csv.string()},
                    {"json", side.string()},
                    {"examined", r.examined()},
                    {"accepted", r.accepted()},
                    {"acceptance_fraction", r.acceptance_fraction()}}
                   .dump()
            << '\n';
}

// ---- theory ----------------------------------------------------------------

struct TheoryArgs {
  std::string geometry = "disc";
  std::string correction;
  double charge = 0.0;
  double step = 0.5;
  std::string out = "theory_cdf.csv";
};

void run_theory(const Globals& g, const TheoryArgs& a) {
  const auto geom = parse_geometry(a.geometry) == ExperimentGeometry::circle ? Geometry::disc_center
                                                                               : Geometry::halfplane_semicircle;
  std::optional<LatticeCorrection> l;
  if (!a.correction.empty()) {
    if (fs::path(a.correction).extension() == ".json") {
      l = assemble_l(CorrectionTable::read_json(a.correction), true);
    } else {
      l = LatticeCorrection::read_csv(a.correction, true);
    }
  }
  const auto ex = exponents_from_charge(a.charge);
  const BoundaryDensity d(geom, l, ex.b);
  const fs::path path = g.output(a.out);
  ensure_parent(path);
  write_theory_csv(path, d, a.step);
  std::cout << json{{"csv", path.string()},
                    {"kappa", ex.kappa},
                    {"b", ex.b},
                    {"b_tilde", ex.b_tilde},
                    {"normalization", d.normalization()}}
                   .dump()
            << '\n';
}

// ---- lerw-check ------------------------------------------------------------

struct LerwArgs {
  std::string domain = "5x5";
  double c = -2.0;
  double beta = 0.25;
  std::uint64_t samples = 1000000;
  int truncation = 14;
  int max_sites = 30;
  std::string out = "lerw_report.json";
};

json edge_json(const ExitEdge& e) { return {e.first.x, e.first.y, e.second.x, e.second.y}; }

void run_lerw(const Globals& g, const LerwArgs& a) {
  const auto dom = FiniteDomain::parse(a.domain);
  json j;
  j["domain"] = a.domain;
  j["sites"] = dom.size();
  j["c"] = a.c;
  j["beta"] = a.beta;

  const auto det = loop_measure_in_domain(dom);
  const auto tr = loop_measure_truncated(dom, a.truncation);
  j["loop_measure"] = {{"determinant", det.value},
                       {"truncated", tr.value},
                       {"truncation_length", tr.max_length},
                       {"tail_bound", tr.tail_bound},
                       {"within_bound", det.value - tr.value <= tr.tail_bound + 1e-14 && tr.value <= det.value + 1e-14}};

  const auto z = lambda_partition_function(dom, a.c, a.beta, std::size_t(a.max_sites));
  const auto h = poisson_kernel(dom);
  json edges = json::array();
  double max_diff = 0.0;
  for (const auto& [e, w] : z.by_edge) {
    const double hk = h.at(e);
    max_diff = std::max(max_diff, std::abs(w - hk));
    edges.push_back({{"edge", edge_json(e)}, {"lambda_saw", w}, {"poisson_kernel", hk}});
  }
  j["partition_function"] = {{"total", z.total}, {"n_walks", z.n_walks}, {"by_edge", edges}};
  // The identity with the random-walk exit law holds for c = -2, beta = 1/4.
  j["poisson_max_abs_diff"] = max_diff;
  j["poisson_identity_applies"] = a.c == -2.0 && a.beta == 0.25;

  if (a.samples > 0) {
    const auto law = lerw_endpoint_law(dom, a.samples, g.seed);
    double tv = 0.0;
    for (const auto& [e, w] : h) tv += 0.5 * std::abs(w - law.at(e));
    j["lerw"] = {{"samples", a.samples}, {"seed", g.seed}, {"tv_vs_poisson_kernel", tv}};
  }
  const fs::path path = g.output(a.out);
  write_json(path, j);
  json brief = j;
  brief["partition_function"].erase("by_edge");
  std::cout << brief.dump() << '\n';
}

// ---- experiment ------------------------------------------------------------

void run_experiment_cmd(const Globals& g) {
  RunConfig cfg = g.config ? *g.config : RunConfig{};
  cfg.seed = g.seed;
  cfg.threads = g.threads;
  const auto s = run_experiment(cfg, g.out_dir);
  std::cout << s.to_json().dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sawlab: self-avoiding walk laboratory"};
  app.fallthrough();
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config_path, "Declarative run file (JSON)");
  g.seed_opt = app.add_option("--seed", g.seed, "Master seed");
  g.threads_opt = app.add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out-dir", g.out_dir, "Directory for outputs");

  EnumerateArgs ea;
  auto* en = app.add_subcommand("enumerate", "Exact SAW counts and line survival");
  en->add_option("--n", ea.n, "Largest N")->required()->check(CLI::Range(1, 30));
  en->add_option("--cap", ea.cap, "Refuse N above this");
  en->add_flag("--naive", ea.naive, "Use the plain depth-first enumerator");
  en->add_option("--line-theta", ea.line_theta, "Line angle in degrees");
  en->add_option("--line-l", ea.line_l, "Line y-intercept");
  en->add_option("--out", ea.out, "JSON output");

  PivotArgs pa;
  auto* pv = app.add_subcommand("pivot", "Run pivot chains and record observables");
  pv->add_option("--n", pa.n, "Walk length")->check(CLI::PositiveNumber);
  pv->add_option("--ensemble", pa.ensemble, "free, halfplane or midbond");
  pv->add_option("--samples", pa.samples, "Samples per chain");
  pv->add_option("--stride", pa.stride, "Attempts between samples");
  pv->add_option("--equilibration", pa.equilibration, "Discarded attempts (-1: 20 N)");
  pv->add_option("--chains", pa.chains, "Independent chains");
  pv->add_option("--observables", pa.observables, "Comma list of r2, rg2, x_end, y_end");
  pv->add_option("--out", pa.out, "CSV output");

  CorrectionArgs ca;
  auto* co = app.add_subcommand("correction", "Estimate the lattice correction table");
  ca.cmd = co;
  co->add_option("--which", ca.which, "1: stopped ensemble, 2: cut-curve ensemble")->check(CLI::IsMember({1, 2}));
  co->add_option("--n", ca.n, "Walk length");
  co->add_option("--samples", ca.samples, "Samples over all chains");
  co->add_option("--stride", ca.stride, "Attempts between samples");
  co->add_option("--equilibration", ca.equilibration, "Discarded attempts (-1: 20 N)");
  co->add_option("--theta-step", ca.theta_step, "Angle step in degrees (divides 90)");
  co->add_option("--chains", ca.chains, "Independent chains");
  co->add_option("--batches", ca.batches, "Batches per chain");
  co->add_option("--sampling", ca.sampling, "uniform_draw or integrated");
  co->add_option("--out", ca.out, "CSV output (JSON sidecar next to it)");

  CutcurveArgs ka;
  auto* cc = app.add_subcommand("cutcurve", "Sample crossing angles of long walks");
  ka.cmd = cc;
  cc->add_option("--geometry", ka.geometry, "disc or halfplane");
  cc->add_option("--R", ka.radius, "Curve radius");
  cc->add_option("--n", ka.n, "Walk length");
  cc->add_option("--nu", ka.nu, "Spacing delta = N^-nu");
  cc->add_option("--samples", ka.samples, "Examined samples over all chains");
  cc->add_option("--stride", ka.stride, "Attempts between samples");
  cc->add_option("--equilibration", ka.equilibration, "Discarded attempts (-1: 20 N)");
  cc->add_option("--chains", ka.chains, "Independent chains");
  cc->add_option("--out", ka.out, "CSV output (JSON sidecar next to it)");

  TheoryArgs ta;
  auto* th = app.add_subcommand("theory", "Theoretical boundary density and CDF");
  th->add_option("--geometry", ta.geometry, "disc or halfplane");
  th->add_option("--correction", ta.correction, "Correction table (CSV or JSON)");
  th->add_option("--c", ta.charge, "Central charge (sets the boundary exponent)");
  th->add_option("--step", ta.step, "Output angle step in degrees");
  th->add_option("--out", ta.out, "CSV output");

  LerwArgs la;
  auto* lw = app.add_subcommand("lerw-check", "Loop-measure and LERW identities on a small domain");
  lw->add_option("--domain", la.domain, "WxH (centred) or WxH@X,Y");
  lw->add_option("--c", la.c, "Central charge");
  lw->add_option("--beta", la.beta, "Fugacity");
  lw->add_option("--samples", la.samples, "Random-walk samples for the LERW law (0 skips)");
  lw->add_option("--truncation", la.truncation, "Loop length cut-off for the enumeration check");
  lw->add_option("--max-sites", la.max_sites, "Refuse exhaustive enumeration above this many sites");
  lw->add_option("--out", la.out, "JSON report");

  auto* ex = app.add_subcommand("experiment", "Full pipeline from a run file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    g.load();
    if (*en) run_enumerate(g, ea);
    if (*pv) run_pivot(g, pa);
    if (*co) run_correction(g, ca);
    if (*cc) run_cutcurve(g, ka);
    if (*th) run_theory(g, ta);
    if (*lw) run_lerw(g, la);
    if (*ex) run_experiment_cmd(g);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kExitConfig;
  } catch (const EnumerationCapExceeded& e) {
    std::cerr << "refused: " << e.what() << '\n';
    return kExitConfig;
  } catch (const StageError& e) {
    std::cerr << "stage failure " << e.what() << '\n';
    return kExitStage;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << '\n';
    return kExitStage;
  }
  return 0;
}
