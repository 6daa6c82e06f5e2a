#include "sawlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>
#include <fmt/format.h>

namespace sawlab {

double batch_means_stderr(std::span<const double> means, std::span<const double> weights) {
  if (means.size() != weights.size()) throw std::invalid_argument("batch means and weights differ in length");
  const std::size_t b = means.size();
  if (b < 2) return 0.0;
  const double wsum = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (wsum <= 0) return 0.0;
  double pooled = 0.0;
  for (std::size_t k = 0; k < b; ++k) pooled += weights[k] * means[k];
  pooled /= wsum;
  double acc = 0.0;
  for (std::size_t k = 0; k < b; ++k) {
    const double r = weights[k] / wsum * (means[k] - pooled);
    acc += r * r;
  }
  return std::sqrt(acc * double(b) / double(b - 1));
}

std::vector<double> fold_angles(std::span<const double> angles_deg, double period_deg) {
  if (!(period_deg > 0)) throw std::invalid_argument("fold period must be positive");
  std::vector<double> out(angles_deg.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    double a = std::fmod(angles_deg[k], period_deg);
    if (a < 0) a += period_deg;
    if (a >= period_deg) a = 0.0;
    out[k] = a;
  }
  return out;
}

std::vector<double> uniform_grid(double lo, double hi, double step) {
  if (!(step > 0) || hi < lo) throw std::invalid_argument("bad grid");
  const auto n = static_cast<std::size_t>(std::llround((hi - lo) / step));
  std::vector<double> g(n + 1);
  for (std::size_t k = 0; k <= n; ++k) g[k] = lo + (hi - lo) * double(k) / double(n ? n : 1);
  return g;
}

namespace {

std::vector<double> prepared(std::span<const double> samples, std::optional<double> fold) {
  std::vector<double> s = fold ? fold_angles(samples, *fold) : std::vector<double>(samples.begin(), samples.end());
  std::sort(s.begin(), s.end());
  return s;
}

std::vector<double> cdf_on_grid(const std::vector<double>& sorted, std::span<const double> grid) {
  std::vector<double> v(grid.size());
  const double n = double(sorted.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto c = std::upper_bound(sorted.begin(), sorted.end(), grid[k]) - sorted.begin();
    v[k] = n > 0 ? double(c) / n : 0.0;
  }
  return v;
}

}  // namespace

Ecdf empirical_cdf(std::span<const double> samples, std::span<const double> grid, std::optional<double> fold) {
  if (samples.empty()) throw std::invalid_argument("empirical CDF of an empty sample");
  Ecdf e;
  e.grid.assign(grid.begin(), grid.end());
  e.values = cdf_on_grid(prepared(samples, fold), grid);
  e.n = samples.size();
  return e;
}

Ecdf batched_ecdf(const std::vector<std::vector<double>>& batches, std::span<const double> grid,
                  std::optional<double> fold) {
  std::vector<double> all;
  std::vector<std::vector<double>> per;
  std::vector<double> weights;
  for (const auto& b : batches) {
    if (b.empty()) continue;
    all.insert(all.end(), b.begin(), b.end());
    per.push_back(cdf_on_grid(prepared(b, fold), grid));
    weights.push_back(double(b.size()));
  }
  Ecdf e = empirical_cdf(all, grid, fold);
  e.stderr.resize(grid.size());
  std::vector<double> col(per.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    for (std::size_t b = 0; b < per.size(); ++b) col[b] = per[b][k];
    e.stderr[k] = batch_means_stderr(col, weights);
  }
  return e;
}

double dkw_bound(std::uint64_t n, double alpha) {
  if (n == 0 || !(alpha > 0 && alpha < 1)) throw std::invalid_argument("bad DKW arguments");
  return std::sqrt(std::log(2.0 / alpha) / (2.0 * double(n)));
}

std::vector<double> Histogram::frequencies() const {
  std::vector<double> f(counts.size());
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = total ? double(counts[k]) / double(total) : 0.0;
  return f;
}

Histogram histogram(std::span<const double> samples, std::span<const double> edges, std::optional<double> fold) {
  if (edges.size() < 2) throw std::invalid_argument("histogram needs at least two edges");
  Histogram h;
  h.edges.assign(edges.begin(), edges.end());
  h.counts.assign(edges.size() - 1, 0);
  for (double x : prepared(samples, fold)) {
    if (x < edges.front() || x > edges.back()) continue;
    auto it = std::lower_bound(edges.begin(), edges.end(), x);
    auto k = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - edges.begin() - 1, 0));
    ++h.counts[k];
    ++h.total;
  }
  return h;
}

EcdfReport compare_cdfs(const Ecdf& ecdf, std::span<const double> theory_uncorrected,
                        std::span<const double> theory_corrected, std::span<const double> theory_corrected_stderr) {
  const std::size_t n = ecdf.grid.size();
  if (theory_uncorrected.size() != n || theory_corrected.size() != n ||
      (!theory_corrected_stderr.empty() && theory_corrected_stderr.size() != n) ||
      (!ecdf.stderr.empty() && ecdf.stderr.size() != n)) {
    throw std::invalid_argument("CDF grids differ");
  }
  EcdfReport r;
  r.grid = ecdf.grid;
  r.empirical = ecdf.values;
  r.empirical_stderr = ecdf.stderr.empty() ? std::vector<double>(n, 0.0) : ecdf.stderr;
  r.theory_uncorrected.assign(theory_uncorrected.begin(), theory_uncorrected.end());
  r.theory_corrected.assign(theory_corrected.begin(), theory_corrected.end());
  r.theory_corrected_stderr =
      theory_corrected_stderr.empty() ? std::vector<double>(n, 0.0)
                                      : std::vector<double>(theory_corrected_stderr.begin(), theory_corrected_stderr.end());
  r.dev_uncorrected.resize(n);
  r.dev_corrected.resize(n);
  r.band_2sigma.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    r.dev_uncorrected[k] = r.empirical[k] - r.theory_uncorrected[k];
    r.dev_corrected[k] = r.empirical[k] - r.theory_corrected[k];
    // Batch means can report zero spread where no batch has mass yet; the
    // ECDF variance is never below the independent-sample binomial value.
    const double f = std::clamp(r.theory_corrected[k], 0.0, 1.0);
    const double binom = ecdf.n ? std::sqrt(f * (1 - f) / static_cast<double>(ecdf.n)) : 0.0;
    const double s = std::hypot(std::max(r.empirical_stderr[k], binom), r.theory_corrected_stderr[k]);
    r.band_2sigma[k] = 2 * s;
    r.max_dev_uncorrected = std::max(r.max_dev_uncorrected, std::abs(r.dev_uncorrected[k]));
    r.max_dev_corrected = std::max(r.max_dev_corrected, std::abs(r.dev_corrected[k]));
    r.max_band_2sigma = std::max(r.max_band_2sigma, r.band_2sigma[k]);
    if (r.band_2sigma[k] > 0) {
      r.max_corrected_in_sigma2 = std::max(r.max_corrected_in_sigma2, std::abs(r.dev_corrected[k]) / r.band_2sigma[k]);
    }
  }
  return r;
}

void EcdfReport::write_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "angle_deg,ecdf,ecdf_stderr,cdf_uncorrected,cdf_corrected,cdf_corrected_stderr,"
         "dev_uncorrected,dev_corrected,band_2sigma\n";
  for (std::size_t k = 0; k < grid.size(); ++k) {
    out << fmt::format("{:.6f},{:.10f},{:.3e},{:.10f},{:.10f},{:.3e},{:.4e},{:.4e},{:.3e}\n", grid[k], empirical[k],
                       empirical_stderr[k], theory_uncorrected[k], theory_corrected[k], theory_corrected_stderr[k],
                       dev_uncorrected[k], dev_corrected[k], band_2sigma[k]);
  }
}

double integrated_autocorrelation_time(std::span<const double> series) {
  const std::size_t n = series.size();
  if (n < 4) return 1.0;
  const double mu = std::accumulate(series.begin(), series.end(), 0.0) / double(n);
  double c0 = 0.0;
  for (double x : series) c0 += (x - mu) * (x - mu);
  c0 /= double(n);
  if (c0 <= 0) return 1.0;
  double tau = 1.0;
  for (std::size_t t = 1; t < n / 2; ++t) {
    double c = 0.0;
    for (std::size_t k = 0; k + t < n; ++k) c += (series[k] - mu) * (series[k + t] - mu);
    c /= double(n) * c0;
    tau += 2 * c;
    if (double(t) >= 6.0 * tau) break;
  }
  return std::max(tau, 1e-12);
}

double chi_square_sf(double statistic, double dof) {
  if (!(dof > 0)) throw std::invalid_argument("chi-square needs positive degrees of freedom");
  if (statistic <= 0) return 1.0;
  return boost::math::gamma_q(dof / 2, statistic / 2);
}

}  // namespace sawlab
