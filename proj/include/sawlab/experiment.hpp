#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "sawlab/correction.hpp"
#include "sawlab/cutcurve.hpp"
#include "sawlab/stats.hpp"
#include "sawlab/theory.hpp"

namespace sawlab {

std::string_view version();

/// Malformed or inconsistent configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A pipeline stage failed (CLI exit code 3); `stage` names it.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& what)
      : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

enum class ExperimentGeometry { circle, semicircle };

struct CorrectionStage {
  std::string source = "estimate";  // "estimate" or "file"
  std::string path;                 // correction JSON when source == "file"
  int n_steps = 101;
  std::uint64_t n_samples = 1000000;
  std::uint64_t stride = 10;
  std::int64_t equilibration = -1;
  double theta_step_deg = 1.0;
  int n_chains = 4;
  int batches_per_chain = 25;
  LSampling sampling = LSampling::uniform_draw;
};

struct CutcurveStage {
  int n_steps = 30000;
  double nu = 0.75;
  double radius = 0.2;
  std::uint64_t n_samples = 600000;  // examined
  std::uint64_t stride = 200;
  std::int64_t equilibration = -1;
  int n_chains = 4;
  int batches_per_chain = 10;
};

struct ComparisonStage {
  double grid_step_deg = 0.5;
  bool jackknife = true;  // propagate correction-table error into the corrected theory
};

/// Declarative run file, schema "sawlab.run/1". Stage seeds are derived from
/// `seed` with distinct tags, so the correction table and the cut-curve
/// samples never share a random stream.
struct RunConfig {
  std::string name = "experiment";
  std::uint64_t seed = 1;
  int threads = 1;
  ExperimentGeometry geometry = ExperimentGeometry::circle;
  CorrectionStage correction;
  CutcurveStage cutcurve;
  ComparisonStage comparison;

  nlohmann::json to_json() const;
  /// Throws ConfigError on unknown keys, wrong types or invalid values.
  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig read(const std::filesystem::path& path);

  std::uint64_t correction_seed() const;
  std::uint64_t cutcurve_seed() const;
  CorrectionConfig correction_config() const;
  CutcurveConfig cutcurve_config() const;
};

std::string_view to_string(ExperimentGeometry g);
ExperimentGeometry parse_geometry(std::string_view name);

/// Fold period used for the comparison: 90 for the circle, none for the
/// semicircle.
std::optional<double> comparison_fold(ExperimentGeometry g);

/// Theory CDFs on `grid`: uncorrected and corrected, plus the jackknife error
/// of the corrected one from the table batches (empty when disabled).
struct TheoryCdfs {
  std::vector<double> uncorrected;
  std::vector<double> corrected;
  std::vector<double> corrected_stderr;
};
TheoryCdfs theory_cdfs(ExperimentGeometry g, const CorrectionTable& table, std::span<const double> grid,
                       bool jackknife);

struct ExperimentSummary {
  double acceptance_fraction = 0.0;
  std::uint64_t n_examined = 0;
  std::uint64_t n_accepted = 0;
  double max_dev_uncorrected = 0.0;
  double max_dev_corrected = 0.0;
  double max_band_2sigma = 0.0;
  double max_corrected_in_sigma2 = 0.0;
  std::vector<std::string> warnings;
  nlohmann::json to_json() const;
};

/// Runs correction -> cut-curve -> theory -> comparison, writing into
/// `out_dir`: correction.csv/json, cutcurve_samples.csv, cutcurve.json,
/// theory_uncorrected.csv, theory_corrected.csv, cdf_comparison.csv,
/// summary.json, manifest.json and timing.json. Every file but timing.json
/// is a pure function of the config.
ExperimentSummary run_experiment(const RunConfig& config, const std::filesystem::path& out_dir);

/// Same comparison from already computed stages.
ExperimentSummary compare_stages(const RunConfig& config, const CorrectionTable& table, const CutcurveResult& cut,
                                 EcdfReport* report_out = nullptr);

/// Writes theory density and CDF (columns angle_deg,density,cdf).
void write_theory_csv(const std::filesystem::path& path, const BoundaryDensity& density, double step_deg);

}  // namespace sawlab
