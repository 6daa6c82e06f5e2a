#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

#include "doctest.h"
#include "sawlab/experiment.hpp"

using namespace sawlab;
namespace fs = std::filesystem;

namespace {

RunConfig tiny_config(ExperimentGeometry g) {
  RunConfig c;
  c.name = "tiny";
  c.seed = 77;
  c.geometry = g;
  c.correction.n_steps = 21;
  c.correction.n_samples = 4000;
  c.correction.theta_step_deg = 5.0;
  c.cutcurve.n_steps = 400;
  c.cutcurve.n_samples = 800;
  c.cutcurve.stride = 20;
  c.cutcurve.n_chains = 2;
  c.cutcurve.batches_per_chain = 4;
  c.comparison.grid_step_deg = 1.0;
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("run config round-trips losslessly") {
  RunConfig c = tiny_config(ExperimentGeometry::semicircle);
  c.cutcurve.nu = 0.7499999999999999;
  c.cutcurve.radius = 0.1 + 0.2;
  c.correction.sampling = LSampling::integrated;
  c.comparison.jackknife = false;
  const auto j = c.to_json();
  const auto back = RunConfig::from_json(nlohmann::json::parse(j.dump()));
  CHECK(back.to_json() == j);
  CHECK(back.cutcurve.nu == c.cutcurve.nu);
  CHECK(back.cutcurve.radius == c.cutcurve.radius);
  CHECK(back.geometry == ExperimentGeometry::semicircle);
}

TEST_CASE("invalid run files are rejected as configuration errors") {
  using nlohmann::json;
  CHECK_THROWS_AS(RunConfig::from_json(json{{"sede", 1}}), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_json(json{{"seed", -4}}), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_json(json{{"seed", "one"}}), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_json(json{{"schema", "sawlab.run/9"}}), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_json(json{{"geometry", "square"}}), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_json(json{{"correction", {{"n_steps", 100}}}}), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_json(json{{"correction", {{"theta_step_deg", 7.0}}}}), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_json(json{{"correction", {{"source", "file"}}}}), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_json(json{{"cutcurve", {{"radius", 0.0}}}}), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_json(json{{"comparison", {{"grid_step_deg", 0.7}}}}), ConfigError);
  CHECK_NOTHROW(RunConfig::from_json(json::object()));
}

TEST_CASE("stage seeds are distinct") {
  const RunConfig c;
  CHECK(c.correction_seed() != c.cutcurve_seed());
  CHECK(c.correction_config().seed == c.correction_seed());
  CHECK(c.cutcurve_config().seed == c.cutcurve_seed());
}

TEST_CASE("pipeline reruns are byte-identical") {
  for (auto g : {ExperimentGeometry::circle, ExperimentGeometry::semicircle}) {
    const auto base = fs::temp_directory_path() / "sawlab_exp_test";
    fs::remove_all(base);
    RunConfig c = tiny_config(g);
    const auto s1 = run_experiment(c, base / "a");
    const auto s2 = run_experiment(c, base / "b");
    c.threads = 2;
    const auto s3 = run_experiment(c, base / "c");
    CHECK(s1.max_dev_corrected == s2.max_dev_corrected);
    CHECK(s1.max_dev_corrected == s3.max_dev_corrected);
    for (const char* f : {"correction.csv", "correction.json", "cutcurve_samples.csv", "cutcurve.json",
                          "theory_uncorrected.csv", "theory_corrected.csv", "cdf_comparison.csv", "summary.json",
                          "manifest.json"}) {
      CAPTURE(f);
      REQUIRE(fs::exists(base / "a" / f));
      CHECK(slurp(base / "a" / f) == slurp(base / "b" / f));
    }
    // Results do not depend on the thread count (the manifest echoes it).
    CHECK(slurp(base / "a" / "cutcurve_samples.csv") == slurp(base / "c" / "cutcurve_samples.csv"));
    CHECK(slurp(base / "a" / "correction.json") == slurp(base / "c" / "correction.json"));
    CHECK(fs::exists(base / "a" / "timing.json"));
    CHECK(s1.n_examined == 800);
    CHECK(s1.max_dev_uncorrected > 0.0);
    fs::remove_all(base);
  }
}

TEST_CASE("a reused correction file gives the same comparison") {
  const auto base = fs::temp_directory_path() / "sawlab_exp_reuse";
  fs::remove_all(base);
  RunConfig c = tiny_config(ExperimentGeometry::circle);
  const auto a = run_experiment(c, base / "a");
  c.correction.source = "file";
  c.correction.path = (base / "a" / "correction.json").string();
  const auto b = run_experiment(c, base / "b");
  CHECK(a.max_dev_corrected == b.max_dev_corrected);
  CHECK(slurp(base / "a" / "cdf_comparison.csv") == slurp(base / "b" / "cdf_comparison.csv"));
  fs::remove_all(base);
}

TEST_CASE("stage failures are tagged") {
  RunConfig c = tiny_config(ExperimentGeometry::circle);
  c.correction.source = "file";
  c.correction.path = "/nonexistent/table.json";
  try {
    run_experiment(c, fs::temp_directory_path() / "sawlab_exp_fail");
    FAIL("expected a stage error");
  } catch (const StageError& e) {
    CHECK(e.stage() == "correction");
  }
  fs::remove_all(fs::temp_directory_path() / "sawlab_exp_fail");
}

TEST_CASE("theory CDFs used by the comparison") {
  CorrectionConfig cc;
  cc.n_steps = 21;
  cc.n_samples = 4000;
  cc.theta_step_deg = 5.0;
  cc.seed = 5;
  const auto table = estimate_p2(cc);
  const auto grid = uniform_grid(0.0, 90.0, 1.0);
  const auto t = theory_cdfs(ExperimentGeometry::circle, table, grid, true);
  CHECK(t.uncorrected[45] == doctest::Approx(0.5));
  CHECK(t.corrected.front() == 0.0);
  CHECK(t.corrected.back() == doctest::Approx(1.0));
  REQUIRE(t.corrected_stderr.size() == grid.size());
  CHECK(t.corrected_stderr[20] > 0.0);
  CHECK(t.corrected_stderr.back() < 1e-12);
}
