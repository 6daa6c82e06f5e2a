#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sawlab/lattice.hpp"
#include "sawlab/pivot.hpp"

namespace sawlab {

struct ExponentSet {
  double rho = 25.0 / 64.0;
  double gamma = 43.0 / 32.0;
  double nu = 0.75;
  double b = 5.0 / 8.0;
  double b_tilde = 5.0 / 48.0;

  /// Exponent multiplying the middle-bond success fraction: 2 rho - gamma + 1.
  double p2_exponent() const { return 2 * rho - gamma + 1; }
  /// Exponent multiplying the no-crossing fraction: rho.
  double p1_exponent() const { return rho; }
};

/// Which correction function: 1 is the stopped-walk ensemble (free walks that
/// avoid the line), 2 the cut-curve ensemble (middle-bond walks whose only
/// intersection with the line is the middle bond).
enum class CorrectionKind { stopped = 1, cut_curve = 2 };

/// `uniform_draw` tests one uniform l per (sample, angle); `integrated`
/// records the exact length of the set of l in [0,1] that succeed, which has
/// the same mean and smaller variance.
enum class LSampling { uniform_draw, integrated };

std::string_view to_string(LSampling s);
LSampling parse_l_sampling(std::string_view name);

/// Set of l in [0,1] for which the line at angle theta through (0,l)
/// succeeds, as [lo, hi] (empty when hi <= lo).
struct LInterval {
  double lo = 0.0;
  double hi = 1.0;
  double length() const { return hi > lo ? hi - lo : 0.0; }
};

/// Middle-bond walk (site n at (0,0), site n+1 at (0,1)): the line meets the
/// walk only in the middle bond. The vertical angle uses the theta -> 90^-
/// limit.
LInterval midbond_success_interval(std::span<const Point> points, double theta);
/// Walk from the origin: the line through (0,l) does not meet the walk.
LInterval avoidance_interval(std::span<const Point> points, double theta);

struct CorrectionConfig {
  CorrectionKind which = CorrectionKind::cut_curve;
  int n_steps = 101;
  std::uint64_t n_samples = 100000;
  std::uint64_t stride = 10;
  std::int64_t equilibration = -1;
  double theta_step_deg = 1.0;
  int n_chains = 4;
  int batches_per_chain = 25;
  int threads = 1;
  std::uint64_t seed = 1;
  LSampling sampling = LSampling::uniform_draw;
  ExponentSet exponents;
  std::uint64_t min_successes = 100;
};

/// Accumulated sums for one contiguous block of samples from one chain.
struct CorrectionBatch {
  int chain = 0;
  std::uint64_t n = 0;
  std::vector<double> sums;              // per measured angle
  std::vector<std::uint64_t> successes;  // per measured angle
};

struct CorrectionRow {
  double theta_deg = 0.0;
  double p_v = 0.0;
  double p_v_stderr = 0.0;
  double p_h = 0.0;
  double p_h_stderr = 0.0;
  double l = 0.0;
  double l_stderr = 0.0;
  std::uint64_t n_success = 0;  // successes behind p_v
  double l_normalized = 0.0;    // l divided by its mean over [0, 90]
  bool low_confidence = false;
};

/// Sampled correction data with everything needed to rebuild the derived
/// columns: p^v is measured on [0, 180) so p^h(theta) = p^v(theta + 90) comes
/// from separate lines rather than from a symmetry.
class CorrectionTable {
 public:
  CorrectionTable() = default;
  CorrectionTable(CorrectionConfig config, std::vector<CorrectionBatch> batches);

  const CorrectionConfig& config() const { return config_; }
  const std::vector<CorrectionBatch>& batches() const { return batches_; }
  double exponent() const;
  std::uint64_t total_samples() const;

  /// Measured angles k * step for k = 0 .. 180/step - 1, in degrees.
  std::vector<double> measured_theta_deg() const;
  /// Raw success fraction and its batch-means error at a measured angle index.
  double fraction(std::size_t k) const;
  double fraction_stderr(std::size_t k) const;

  /// Rows on [0, 90] (inclusive) at the configured step.
  const std::vector<CorrectionRow>& rows() const { return rows_; }
  bool has_low_confidence() const;

  /// Table built from all batches except one (jackknife replicates).
  CorrectionTable without_batch(std::size_t b) const;

  void write_csv(const std::filesystem::path& path) const;
  void write_json(const std::filesystem::path& path) const;
  static CorrectionTable read_json(const std::filesystem::path& path);

 private:
  void summarize();

  CorrectionConfig config_;
  std::vector<CorrectionBatch> batches_;
  std::vector<CorrectionRow> rows_;
};

/// Runs the chains and accumulates the estimator for the configured kind.
CorrectionTable estimate_correction(const CorrectionConfig& config);
CorrectionTable estimate_p2(const CorrectionConfig& config);
CorrectionTable estimate_p1(const CorrectionConfig& config);

/// l(theta) on the full circle from a [0, 90] grid, by linear interpolation
/// with period 90 degrees.
class LatticeCorrection {
 public:
  LatticeCorrection(std::vector<double> theta_deg, std::vector<double> values, std::vector<double> stderrs = {});

  /// Constant function (no lattice effect).
  static LatticeCorrection flat();
  /// Period-90 extension of l from a table (`normalized` divides by the mean).
  static LatticeCorrection from_table(const CorrectionTable& table, bool normalized = false);
  /// Reads theta_deg and l (or l_normalized) columns from a correction CSV.
  static LatticeCorrection read_csv(const std::filesystem::path& path, bool normalized = false);

  double operator()(double theta_deg) const;
  double stderr_at(double theta_deg) const;
  /// Mean over one period (exact for the piecewise-linear interpolant).
  double mean() const;
  const std::vector<double>& theta_deg() const { return theta_; }
  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<double> theta_;
  std::vector<double> values_;
  std::vector<double> stderr_;
};

/// l(theta) = |cos theta| p^v(theta) + |sin theta| p^h(theta) on the table
/// grid, returned as a function on the full circle.
LatticeCorrection assemble_l(const CorrectionTable& table, bool normalized = false);

}  // namespace sawlab
