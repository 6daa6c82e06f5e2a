#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sawlab {

/// Standard error of the pooled mean sum(w m) / sum(w) from batch means m_b
/// with weights w_b (ratio-estimator batch means). Zero for fewer than two
/// batches.
double batch_means_stderr(std::span<const double> means, std::span<const double> weights);

/// Reduces every angle into [0, period).
std::vector<double> fold_angles(std::span<const double> angles_deg, double period_deg);

/// Evenly spaced grid lo, lo + step, ..., hi (hi included).
std::vector<double> uniform_grid(double lo, double hi, double step);

struct Ecdf {
  std::vector<double> grid;
  std::vector<double> values;  // fraction of samples <= grid point
  std::vector<double> stderr;  // batch-means error (empty without batches)
  std::uint64_t n = 0;
};

/// Right-continuous empirical CDF on `grid`, optionally folding modulo `fold`.
Ecdf empirical_cdf(std::span<const double> samples, std::span<const double> grid,
                   std::optional<double> fold = std::nullopt);

/// Pooled CDF of several batches with a batch-means error at every grid point.
Ecdf batched_ecdf(const std::vector<std::vector<double>>& batches, std::span<const double> grid,
                  std::optional<double> fold = std::nullopt);

/// Dvoretzky-Kiefer-Wolfowitz radius: P(sup |F_n - F| > eps) <= alpha.
double dkw_bound(std::uint64_t n, double alpha);

struct Histogram {
  std::vector<double> edges;
  std::vector<std::uint64_t> counts;  // counts[k]: edges[k] < x <= edges[k+1] (first bin closed on the left)
  std::uint64_t total = 0;
  std::vector<double> frequencies() const;
};

Histogram histogram(std::span<const double> samples, std::span<const double> edges,
                    std::optional<double> fold = std::nullopt);

struct EcdfReport {
  std::vector<double> grid;
  std::vector<double> empirical;
  std::vector<double> empirical_stderr;
  std::vector<double> theory_uncorrected;
  std::vector<double> theory_corrected;
  std::vector<double> theory_corrected_stderr;
  std::vector<double> dev_uncorrected;  // empirical - uncorrected theory
  std::vector<double> dev_corrected;    // empirical - corrected theory
  std::vector<double> band_2sigma;      // 2 sqrt(ecdf var + corrected-theory var), ecdf var >= F(1-F)/n
  double max_dev_uncorrected = 0.0;
  double max_dev_corrected = 0.0;
  double max_band_2sigma = 0.0;
  /// max |dev_corrected| / band over points with a non-zero band.
  double max_corrected_in_sigma2 = 0.0;

  void write_csv(const std::filesystem::path& path) const;
};

/// Builds the deviation report; all inputs must share `ecdf.grid`.
EcdfReport compare_cdfs(const Ecdf& ecdf, std::span<const double> theory_uncorrected,
                        std::span<const double> theory_corrected,
                        std::span<const double> theory_corrected_stderr = {});

/// Integrated autocorrelation time with Sokal's automatic window (c = 6).
/// tau = 1 for an uncorrelated series.
double integrated_autocorrelation_time(std::span<const double> series);

/// Upper-tail probability of a chi-square variable with `dof` degrees.
double chi_square_sf(double statistic, double dof);

}  // namespace sawlab
