#include "sawlab/experiment.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <iterator>
#include <set>

#include <fmt/format.h>

#include "sawlab/rng.hpp"

#ifndef SAWLAB_VERSION
#define SAWLAB_VERSION "0.0.0"
#endif

namespace sawlab {

using nlohmann::json;

namespace {

constexpr const char* kRunSchema = "sawlab.run/1";

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items()) {
    if (!ok.contains(k)) throw ConfigError(fmt::format("unknown key '{}' in {}", k, where));
  }
}

template <class T>
void read_field(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  const json& v = j.at(key);
  const std::string name = where + "." + key;
  if constexpr (std::is_same_v<T, bool>) {
    if (!v.is_boolean()) throw ConfigError(name + " must be a boolean");
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (!v.is_string()) throw ConfigError(name + " must be a string");
  } else if constexpr (std::is_floating_point_v<T>) {
    if (!v.is_number()) throw ConfigError(name + " must be a number");
  } else if constexpr (std::is_unsigned_v<T>) {
    if (!v.is_number_unsigned()) throw ConfigError(name + " must be a non-negative integer");
  } else {
    if (!v.is_number_integer()) throw ConfigError(name + " must be an integer");
  }
  out = v.get<T>();
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

std::uint64_t fnv1a_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::istreambuf_iterator<char> it(in), end; it != end; ++it) h = (h ^ static_cast<unsigned char>(*it)) * 0x100000001b3ULL;
  return h;
}

void write_json_file(const std::filesystem::path& p, const json& j) {
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << j.dump(1) << '\n';
}

template <class F>
auto stage(const char* name, F&& f) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

double range_hi(ExperimentGeometry g) { return g == ExperimentGeometry::circle ? 90.0 : 180.0; }

Geometry theory_geometry(ExperimentGeometry g) {
  return g == ExperimentGeometry::circle ? Geometry::disc_center : Geometry::halfplane_semicircle;
}

std::vector<double> corrected_cdf(ExperimentGeometry g, const LatticeCorrection& l, std::span<const double> grid) {
  const BoundaryDensity d(theory_geometry(g), l);
  return density_cdf(d, grid, comparison_fold(g));
}

}  // namespace

std::string_view version() { return SAWLAB_VERSION; }

std::string_view to_string(ExperimentGeometry g) { return g == ExperimentGeometry::circle ? "circle" : "semicircle"; }

ExperimentGeometry parse_geometry(std::string_view name) {
  if (name == "circle" || name == "disc") return ExperimentGeometry::circle;
  if (name == "semicircle" || name == "halfplane") return ExperimentGeometry::semicircle;
  throw ConfigError("unknown geometry '" + std::string(name) + "'");
}

std::optional<double> comparison_fold(ExperimentGeometry g) {
  if (g == ExperimentGeometry::circle) return 90.0;
  return std::nullopt;
}

json RunConfig::to_json() const {
  const auto& c = correction;
  const auto& k = cutcurve;
  return {{"schema", kRunSchema},
          {"name", name},
          {"seed", seed},
          {"threads", threads},
          {"geometry", to_string(geometry)},
          {"correction",
           {{"source", c.source},
            {"path", c.path},
            {"n_steps", c.n_steps},
            {"n_samples", c.n_samples},
            {"stride", c.stride},
            {"equilibration", c.equilibration},
            {"theta_step_deg", c.theta_step_deg},
            {"n_chains", c.n_chains},
            {"batches_per_chain", c.batches_per_chain},
            {"sampling", sawlab::to_string(c.sampling)}}},
          {"cutcurve",
           {{"n_steps", k.n_steps},
            {"nu", k.nu},
            {"radius", k.radius},
            {"n_samples", k.n_samples},
            {"stride", k.stride},
            {"equilibration", k.equilibration},
            {"n_chains", k.n_chains},
            {"batches_per_chain", k.batches_per_chain}}},
          {"comparison", {{"grid_step_deg", comparison.grid_step_deg}, {"jackknife", comparison.jackknife}}}};
}

RunConfig RunConfig::from_json(const json& j) {
  check_keys(j, {"schema", "name", "seed", "threads", "geometry", "correction", "cutcurve", "comparison"}, "config");
  if (j.contains("schema") && j.at("schema") != kRunSchema) {
    throw ConfigError(fmt::format("unsupported schema {} (expected {})", j.at("schema").dump(), kRunSchema));
  }
  RunConfig r;
  read_field(j, "name", r.name, "config");
  read_field(j, "seed", r.seed, "config");
  read_field(j, "threads", r.threads, "config");
  if (j.contains("geometry")) {
    std::string g;
    read_field(j, "geometry", g, "config");
    r.geometry = parse_geometry(g);
  }
  if (j.contains("correction")) {
    const auto& c = j.at("correction");
    check_keys(c, {"source", "path", "n_steps", "n_samples", "stride", "equilibration", "theta_step_deg", "n_chains",
                   "batches_per_chain", "sampling"},
               "correction");
    auto& o = r.correction;
    read_field(c, "source", o.source, "correction");
    read_field(c, "path", o.path, "correction");
    read_field(c, "n_steps", o.n_steps, "correction");
    read_field(c, "n_samples", o.n_samples, "correction");
    read_field(c, "stride", o.stride, "correction");
    read_field(c, "equilibration", o.equilibration, "correction");
    read_field(c, "theta_step_deg", o.theta_step_deg, "correction");
    read_field(c, "n_chains", o.n_chains, "correction");
    read_field(c, "batches_per_chain", o.batches_per_chain, "correction");
    if (c.contains("sampling")) {
      std::string s;
      read_field(c, "sampling", s, "correction");
      try {
        o.sampling = parse_l_sampling(s);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
    }
  }
  if (j.contains("cutcurve")) {
    const auto& c = j.at("cutcurve");
    check_keys(c, {"n_steps", "nu", "radius", "n_samples", "stride", "equilibration", "n_chains", "batches_per_chain"},
               "cutcurve");
    auto& o = r.cutcurve;
    read_field(c, "n_steps", o.n_steps, "cutcurve");
    read_field(c, "nu", o.nu, "cutcurve");
    read_field(c, "radius", o.radius, "cutcurve");
    read_field(c, "n_samples", o.n_samples, "cutcurve");
    read_field(c, "stride", o.stride, "cutcurve");
    read_field(c, "equilibration", o.equilibration, "cutcurve");
    read_field(c, "n_chains", o.n_chains, "cutcurve");
    read_field(c, "batches_per_chain", o.batches_per_chain, "cutcurve");
  }
  if (j.contains("comparison")) {
    const auto& c = j.at("comparison");
    check_keys(c, {"grid_step_deg", "jackknife"}, "comparison");
    read_field(c, "grid_step_deg", r.comparison.grid_step_deg, "comparison");
    read_field(c, "jackknife", r.comparison.jackknife, "comparison");
  }

  require(r.threads >= 1, "threads must be >= 1");
  const auto& c = r.correction;
  require(c.source == "estimate" || c.source == "file", "correction.source must be 'estimate' or 'file'");
  require(c.source != "file" || !c.path.empty(), "correction.path is required when source is 'file'");
  require(c.n_steps >= 3 && c.n_steps % 2 == 1, "correction.n_steps must be odd and >= 3");
  require(c.n_chains >= 1 && c.batches_per_chain >= 1, "correction needs at least one chain and batch");
  require(c.n_samples >= std::uint64_t(c.n_chains), "correction.n_samples must cover every chain");
  require(c.stride >= 1, "correction.stride must be >= 1");
  const double per = 90.0 / c.theta_step_deg;
  require(c.theta_step_deg > 0 && std::abs(per - std::round(per)) < 1e-9, "correction.theta_step_deg must divide 90");
  const auto& k = r.cutcurve;
  require(k.n_steps >= 2, "cutcurve.n_steps must be >= 2");
  require(k.nu > 0 && k.radius > 0, "cutcurve.nu and cutcurve.radius must be positive");
  require(k.n_chains >= 1 && k.batches_per_chain >= 1, "cutcurve needs at least one chain and batch");
  require(k.n_samples >= std::uint64_t(k.n_chains), "cutcurve.n_samples must cover every chain");
  require(k.stride >= 1, "cutcurve.stride must be >= 1");
  const double cells = range_hi(r.geometry) / r.comparison.grid_step_deg;
  require(r.comparison.grid_step_deg > 0 && std::abs(cells - std::round(cells)) < 1e-9,
          "comparison.grid_step_deg must divide the angle range");
  return r;
}

RunConfig RunConfig::read(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
  return from_json(j);
}

std::uint64_t RunConfig::correction_seed() const { return derive_seed(seed, "stage-correction"); }
std::uint64_t RunConfig::cutcurve_seed() const { return derive_seed(seed, "stage-cutcurve"); }

CorrectionConfig RunConfig::correction_config() const {
  CorrectionConfig c;
  c.which = CorrectionKind::cut_curve;
  c.n_steps = correction.n_steps;
  c.n_samples = correction.n_samples;
  c.stride = correction.stride;
  c.equilibration = correction.equilibration;
  c.theta_step_deg = correction.theta_step_deg;
  c.n_chains = correction.n_chains;
  c.batches_per_chain = correction.batches_per_chain;
  c.threads = threads;
  c.seed = correction_seed();
  c.sampling = correction.sampling;
  return c;
}

CutcurveConfig RunConfig::cutcurve_config() const {
  CutcurveConfig c;
  const bool circle = geometry == ExperimentGeometry::circle;
  c.ensemble = circle ? Ensemble::free : Ensemble::upper_half_plane;
  c.curve = {circle ? CurveKind::circle : CurveKind::semicircle_upper, cutcurve.radius};
  c.n_steps = cutcurve.n_steps;
  c.nu = cutcurve.nu;
  c.n_samples = cutcurve.n_samples;
  c.stride = cutcurve.stride;
  c.equilibration = cutcurve.equilibration;
  c.n_chains = cutcurve.n_chains;
  c.threads = threads;
  c.seed = cutcurve_seed();
  return c;
}

TheoryCdfs theory_cdfs(ExperimentGeometry g, const CorrectionTable& table, std::span<const double> grid,
                       bool jackknife) {
  TheoryCdfs t;
  const BoundaryDensity plain(theory_geometry(g));
  t.uncorrected = density_cdf(plain, grid, comparison_fold(g));
  t.corrected = corrected_cdf(g, assemble_l(table, true), grid);
  const std::size_t nb = table.batches().size();
  if (!jackknife || nb < 2) return t;
  std::vector<std::vector<double>> reps;
  reps.reserve(nb);
  for (std::size_t b = 0; b < nb; ++b) reps.push_back(corrected_cdf(g, assemble_l(table.without_batch(b), true), grid));
  t.corrected_stderr.assign(grid.size(), 0.0);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    double mean = 0.0;
    for (const auto& r : reps) mean += r[k];
    mean /= double(nb);
    double ss = 0.0;
    for (const auto& r : reps) ss += (r[k] - mean) * (r[k] - mean);
    t.corrected_stderr[k] = std::sqrt(ss * double(nb - 1) / double(nb));
  }
  return t;
}

json ExperimentSummary::to_json() const {
  return {{"acceptance_fraction", acceptance_fraction},
          {"n_examined", n_examined},
          {"n_accepted", n_accepted},
          {"max_dev_uncorrected", max_dev_uncorrected},
          {"max_dev_corrected", max_dev_corrected},
          {"max_band_2sigma", max_band_2sigma},
          {"max_corrected_in_sigma2", max_corrected_in_sigma2},
          {"reduction_factor", max_dev_corrected > 0 ? max_dev_uncorrected / max_dev_corrected : 0.0},
          {"warnings", warnings}};
}

ExperimentSummary compare_stages(const RunConfig& config, const CorrectionTable& table, const CutcurveResult& cut,
                                 EcdfReport* report_out) {
  if (cut.accepted() == 0) throw StageError("compare", "no accepted cut-curve samples");
  const auto grid = uniform_grid(0.0, range_hi(config.geometry), config.comparison.grid_step_deg);
  const auto ecdf = batched_ecdf(cut.batches(config.cutcurve.batches_per_chain), grid, comparison_fold(config.geometry));
  const auto th = stage("theory", [&] { return theory_cdfs(config.geometry, table, grid, config.comparison.jackknife); });
  auto report = compare_cdfs(ecdf, th.uncorrected, th.corrected, th.corrected_stderr);
  ExperimentSummary s;
  s.acceptance_fraction = cut.acceptance_fraction();
  s.n_examined = cut.examined();
  s.n_accepted = cut.accepted();
  s.max_dev_uncorrected = report.max_dev_uncorrected;
  s.max_dev_corrected = report.max_dev_corrected;
  s.max_band_2sigma = report.max_band_2sigma;
  s.max_corrected_in_sigma2 = report.max_corrected_in_sigma2;
  if (table.has_low_confidence()) s.warnings.push_back("correction table has low-confidence angles");
  for (const auto& c : cut.chains) {
    if (c.tau_int_acceptance > 2.0) {
      s.warnings.push_back(fmt::format("cut-curve chain {}: autocorrelation time {:.2f} samples", c.chain_id,
                                       c.tau_int_acceptance));
    }
  }
  if (report_out) *report_out = std::move(report);
  return s;
}

void write_theory_csv(const std::filesystem::path& path, const BoundaryDensity& density, double step_deg) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "angle_deg,density,cdf\n";
  for (double t : uniform_grid(density.range_lo(), density.range_hi(), step_deg)) {
    out << fmt::format("{:.6f},{:.12e},{:.12f}\n", t, density.density(t), density.cdf(t));
  }
}

ExperimentSummary run_experiment(const RunConfig& config, const std::filesystem::path& out_dir) {
  using clock = std::chrono::steady_clock;
  auto seconds = [](clock::time_point a) { return std::chrono::duration<double>(clock::now() - a).count(); };
  json timing = json::object();
  stage("output", [&] {
    std::filesystem::create_directories(out_dir);
    return 0;
  });

  auto t0 = clock::now();
  const CorrectionTable table = stage("correction", [&] {
    CorrectionTable t = config.correction.source == "file" ? CorrectionTable::read_json(config.correction.path)
                                                           : estimate_p2(config.correction_config());
    t.write_csv(out_dir / "correction.csv");
    t.write_json(out_dir / "correction.json");
    return t;
  });
  timing["correction_s"] = seconds(t0);

  t0 = clock::now();
  const CutcurveResult cut = stage("cutcurve", [&] {
    CutcurveResult r = sample_cutcurve(config.cutcurve_config());
    r.write_csv(out_dir / "cutcurve_samples.csv");
    r.write_json(out_dir / "cutcurve.json");
    return r;
  });
  timing["cutcurve_s"] = seconds(t0);

  t0 = clock::now();
  stage("theory", [&] {
    const Geometry g = theory_geometry(config.geometry);
    write_theory_csv(out_dir / "theory_uncorrected.csv", BoundaryDensity(g), 0.5);
    write_theory_csv(out_dir / "theory_corrected.csv", BoundaryDensity(g, assemble_l(table, true)), 0.5);
    return 0;
  });
  EcdfReport report;
  const ExperimentSummary summary = stage("compare", [&] {
    ExperimentSummary s = compare_stages(config, table, cut, &report);
    report.write_csv(out_dir / "cdf_comparison.csv");
    json js = s.to_json();
    js["schema"] = "sawlab.summary/1";
    js["name"] = config.name;
    js["geometry"] = to_string(config.geometry);
    write_json_file(out_dir / "summary.json", js);
    return s;
  });
  timing["compare_s"] = seconds(t0);

  stage("manifest", [&] {
    json m;
    m["schema"] = "sawlab.manifest/1";
    m["version"] = version();
    m["config"] = config.to_json();
    json chains = json::array();
    for (const auto& c : cut.chains) chains.push_back(c.seed);
    json corr_chains = json::array();
    for (int c = 0; c < config.correction.n_chains; ++c) {
      corr_chains.push_back(derive_seed(config.correction_seed(), "correction-chain", std::uint64_t(c)));
    }
    m["seeds"] = {{"master", config.seed},
                  {"correction", config.correction_seed()},
                  {"correction_chains", corr_chains},
                  {"cutcurve", config.cutcurve_seed()},
                  {"cutcurve_chains", chains}};
    json files = json::array();
    for (const char* f : {"correction.csv", "correction.json", "cutcurve_samples.csv", "cutcurve.json",
                          "theory_uncorrected.csv", "theory_corrected.csv", "cdf_comparison.csv", "summary.json"}) {
      files.push_back({{"file", f},
                       {"bytes", std::filesystem::file_size(out_dir / f)},
                       {"fnv1a64", fmt::format("{:016x}", fnv1a_file(out_dir / f))}});
    }
    m["outputs"] = files;
    m["timing_file"] = "timing.json";
    write_json_file(out_dir / "manifest.json", m);
    write_json_file(out_dir / "timing.json", timing);
    return 0;
  });
  return summary;
}

}  // namespace sawlab
