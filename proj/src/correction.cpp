#include "sawlab/correction.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <fmt/format.h>
#include "json.hpp"

#include "sawlab/stats.hpp"

namespace sawlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDeg = std::numbers::pi / 180.0;

bool is_vertical(double theta) { return std::abs(theta - std::numbers::pi / 2) < 1e-12; }

// Intercept of the line through p at angle theta with the y axis. In the
// vertical limit theta -> 90^- the order is: x > 0 below, x < 0 above, and
// sites on the axis ordered by y.
struct InterceptMap {
  bool vertical = false;
  double t = 0.0;
  double touch = kTouchTolerance;  // tolerance on l matching |signed distance| <= tau

  explicit InterceptMap(double theta) {
    const double th = wrap_angle(theta, std::numbers::pi);
    vertical = is_vertical(th);
    if (!vertical) {
      t = std::tan(th);
      touch = kTouchTolerance / std::abs(std::cos(th));
    }
  }
  double operator()(Point p) const {
    if (vertical) return p.x == 0 ? double(p.y) : (p.x > 0 ? -kInf : kInf);
    return double(p.y) - double(p.x) * t;
  }
};

LInterval midbond_interval(std::span<const Point> pts, const InterceptMap& u) {
  const std::size_t half = pts.size() / 2;  // sites 0..n are the first half
  LInterval iv;
  for (std::size_t i = 0; i < half; ++i) iv.lo = std::max(iv.lo, u(pts[i]));
  for (std::size_t i = half; i < pts.size(); ++i) iv.hi = std::min(iv.hi, u(pts[i]));
  return iv;
}

LInterval avoid_interval(std::span<const Point> pts, const InterceptMap& u) {
  LInterval iv;
  for (Point p : pts) iv.lo = std::max(iv.lo, u(p));
  return iv;
}

std::size_t measured_count(double step) {
  const double k = 180.0 / step;
  const auto r = static_cast<std::size_t>(std::llround(k));
  if (step <= 0 || std::abs(k - double(r)) > 1e-9 || r % 2 != 0) {
    throw std::invalid_argument("theta step must divide 90 degrees");
  }
  return r;
}

std::vector<CorrectionBatch> run_one_chain(const CorrectionConfig& cfg, int chain_id, std::uint64_t n_samples) {
  const bool cut = cfg.which == CorrectionKind::cut_curve;
  const Ensemble kind = cut ? Ensemble::middle_bond_vertical : Ensemble::free;
  const std::size_t n_theta = measured_count(cfg.theta_step_deg);
  std::vector<InterceptMap> maps;
  maps.reserve(n_theta);
  for (std::size_t k = 0; k < n_theta; ++k) maps.emplace_back(double(k) * cfg.theta_step_deg * kDeg);

  const auto n_batches = static_cast<std::uint64_t>(std::max(1, cfg.batches_per_chain));
  std::vector<CorrectionBatch> batches(n_batches);
  for (auto& b : batches) {
    b.chain = chain_id;
    b.sums.assign(n_theta, 0.0);
    b.successes.assign(n_theta, 0);
  }

  PivotChain chain(cfg.n_steps, {kind}, derive_seed(cfg.seed, "correction-chain", std::uint64_t(chain_id)));
  Rng lrng = make_rng(derive_seed(cfg.seed, "correction-l", std::uint64_t(chain_id)));
  std::vector<Point> pts;
  const ChainSchedule schedule{n_samples, cfg.stride, cfg.equilibration};
  run_chain(chain, schedule, [&](std::uint64_t s, const PivotChain& c) {
    CorrectionBatch& batch = batches[s * n_batches / n_samples];
    ++batch.n;
    c.tree().materialize(pts);
    for (std::size_t k = 0; k < n_theta; ++k) {
      const InterceptMap& u = maps[k];
      const LInterval iv = cut ? midbond_interval(pts, u) : avoid_interval(pts, u);
      double l = 0.0;
      do {
        l = uniform01(lrng);
      } while (std::abs(l - iv.lo) <= u.touch || std::abs(l - iv.hi) <= u.touch);
      const bool ok = iv.lo < l && l < iv.hi;
      batch.successes[k] += ok;
      batch.sums[k] += cfg.sampling == LSampling::integrated ? iv.length() : double(ok);
    }
  });
  std::erase_if(batches, [](const CorrectionBatch& b) { return b.n == 0; });
  return batches;
}

}  // namespace

std::string_view to_string(LSampling s) { return s == LSampling::integrated ? "integrated" : "uniform_draw"; }

LSampling parse_l_sampling(std::string_view name) {
  if (name == "uniform_draw") return LSampling::uniform_draw;
  if (name == "integrated") return LSampling::integrated;
  throw std::invalid_argument("unknown l sampling '" + std::string(name) + "'");
}

LInterval midbond_success_interval(std::span<const Point> points, double theta) {
  if (points.size() < 2 || points.size() % 2 != 0) throw std::invalid_argument("middle-bond walk needs odd N");
  return midbond_interval(points, InterceptMap(theta));
}

LInterval avoidance_interval(std::span<const Point> points, double theta) {
  if (points.empty()) throw std::invalid_argument("empty walk");
  return avoid_interval(points, InterceptMap(theta));
}

CorrectionTable::CorrectionTable(CorrectionConfig config, std::vector<CorrectionBatch> batches)
    : config_(std::move(config)), batches_(std::move(batches)) {
  summarize();
}

double CorrectionTable::exponent() const {
  return config_.which == CorrectionKind::cut_curve ? config_.exponents.p2_exponent()
                                                    : config_.exponents.p1_exponent();
}

std::uint64_t CorrectionTable::total_samples() const {
  std::uint64_t n = 0;
  for (const auto& b : batches_) n += b.n;
  return n;
}

std::vector<double> CorrectionTable::measured_theta_deg() const {
  std::vector<double> out(measured_count(config_.theta_step_deg));
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = double(k) * config_.theta_step_deg;
  return out;
}

double CorrectionTable::fraction(std::size_t k) const {
  double s = 0.0;
  for (const auto& b : batches_) s += b.sums.at(k);
  const auto n = total_samples();
  return n ? s / double(n) : 0.0;
}

double CorrectionTable::fraction_stderr(std::size_t k) const {
  std::vector<double> means;
  std::vector<double> weights;
  for (const auto& b : batches_) {
    means.push_back(b.sums.at(k) / double(b.n));
    weights.push_back(double(b.n));
  }
  return batch_means_stderr(means, weights);
}

bool CorrectionTable::has_low_confidence() const {
  return std::any_of(rows_.begin(), rows_.end(), [](const CorrectionRow& r) { return r.low_confidence; });
}

void CorrectionTable::summarize() {
  rows_.clear();
  if (batches_.empty()) return;
  const std::size_t n_theta = measured_count(config_.theta_step_deg);
  const std::size_t quarter = n_theta / 2;
  const double scale = std::pow(double(config_.n_steps), exponent());
  const std::size_t n_b = batches_.size();
  std::vector<double> weights(n_b);
  for (std::size_t b = 0; b < n_b; ++b) weights[b] = double(batches_[b].n);

  std::vector<double> mv(n_b);
  std::vector<double> mh(n_b);
  std::vector<double> ml(n_b);
  for (std::size_t j = 0; j <= quarter; ++j) {
    const std::size_t kv = j;
    const std::size_t kh = (j + quarter) % n_theta;
    const double th = double(j) * config_.theta_step_deg * kDeg;
    const double cv = std::abs(std::cos(th));
    const double ch = std::abs(std::sin(th));
    CorrectionRow row;
    row.theta_deg = double(j) * config_.theta_step_deg;
    std::uint64_t succ_h = 0;
    for (std::size_t b = 0; b < n_b; ++b) {
      const auto& bt = batches_[b];
      mv[b] = bt.sums[kv] / weights[b] * scale;
      mh[b] = bt.sums[kh] / weights[b] * scale;
      ml[b] = cv * mv[b] + ch * mh[b];
      row.n_success += bt.successes[kv];
      succ_h += bt.successes[kh];
    }
    row.p_v = fraction(kv) * scale;
    row.p_h = fraction(kh) * scale;
    row.l = cv * row.p_v + ch * row.p_h;
    row.p_v_stderr = batch_means_stderr(mv, weights);
    row.p_h_stderr = batch_means_stderr(mh, weights);
    row.l_stderr = batch_means_stderr(ml, weights);
    row.low_confidence = row.n_success < config_.min_successes || succ_h < config_.min_successes;
    rows_.push_back(row);
  }
  double area = 0.0;
  for (std::size_t j = 1; j < rows_.size(); ++j) {
    area += 0.5 * (rows_[j].l + rows_[j - 1].l) * (rows_[j].theta_deg - rows_[j - 1].theta_deg);
  }
  const double mean = area / 90.0;
  for (auto& r : rows_) r.l_normalized = mean > 0 ? r.l / mean : 0.0;
}

CorrectionTable CorrectionTable::without_batch(std::size_t b) const {
  if (b >= batches_.size()) throw std::out_of_range("batch index");
  auto rest = batches_;
  rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(b));
  return CorrectionTable(config_, std::move(rest));
}

void CorrectionTable::write_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "theta_deg,p_v,p_v_stderr,l,l_stderr,n_success,l_normalized,p_h,p_h_stderr,low_confidence\n";
  for (const auto& r : rows_) {
    out << fmt::format("{:.6g},{:.10g},{:.6g},{:.10g},{:.6g},{},{:.10g},{:.10g},{:.6g},{}\n", r.theta_deg, r.p_v,
                       r.p_v_stderr, r.l, r.l_stderr, r.n_success, r.l_normalized, r.p_h, r.p_h_stderr,
                       r.low_confidence ? 1 : 0);
  }
}

void CorrectionTable::write_json(const std::filesystem::path& path) const {
  nlohmann::json j;
  j["schema"] = "sawlab.correction/1";
  j["which"] = static_cast<int>(config_.which);
  j["n_steps"] = config_.n_steps;
  j["n_samples"] = total_samples();
  j["stride"] = config_.stride;
  j["equilibration"] = config_.equilibration;
  j["theta_step_deg"] = config_.theta_step_deg;
  j["n_chains"] = config_.n_chains;
  j["batches_per_chain"] = config_.batches_per_chain;
  j["seed"] = config_.seed;
  j["l_sampling"] = to_string(config_.sampling);
  j["min_successes"] = config_.min_successes;
  j["exponents"] = {{"rho", config_.exponents.rho},     {"gamma", config_.exponents.gamma},
                    {"nu", config_.exponents.nu},       {"b", config_.exponents.b},
                    {"b_tilde", config_.exponents.b_tilde}};
  j["exponent_used"] = exponent();
  j["measured_theta_deg"] = measured_theta_deg();
  auto& jb = j["batches"] = nlohmann::json::array();
  for (const auto& b : batches_) {
    jb.push_back({{"chain", b.chain}, {"n", b.n}, {"sums", b.sums}, {"successes", b.successes}});
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(1) << '\n';
}

CorrectionTable CorrectionTable::read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  const auto j = nlohmann::json::parse(in);
  if (j.at("schema") != "sawlab.correction/1") throw std::runtime_error("unknown correction schema");
  CorrectionConfig cfg;
  cfg.which = static_cast<CorrectionKind>(j.at("which").get<int>());
  cfg.n_steps = j.at("n_steps");
  cfg.n_samples = j.at("n_samples");
  cfg.stride = j.at("stride");
  cfg.equilibration = j.at("equilibration");
  cfg.theta_step_deg = j.at("theta_step_deg");
  cfg.n_chains = j.at("n_chains");
  cfg.batches_per_chain = j.at("batches_per_chain");
  cfg.seed = j.at("seed");
  cfg.sampling = parse_l_sampling(j.at("l_sampling").get<std::string>());
  cfg.min_successes = j.at("min_successes");
  const auto& e = j.at("exponents");
  cfg.exponents = {e.at("rho"), e.at("gamma"), e.at("nu"), e.at("b"), e.at("b_tilde")};
  std::vector<CorrectionBatch> batches;
  for (const auto& b : j.at("batches")) {
    batches.push_back({b.at("chain"), b.at("n"), b.at("sums").get<std::vector<double>>(),
                       b.at("successes").get<std::vector<std::uint64_t>>()});
  }
  return CorrectionTable(cfg, std::move(batches));
}

CorrectionTable estimate_correction(const CorrectionConfig& config) {
  if (config.n_steps < 1) throw std::invalid_argument("N must be positive");
  if (config.which == CorrectionKind::cut_curve && (config.n_steps % 2 == 0 || config.n_steps < 3)) {
    throw std::invalid_argument("middle-bond estimator needs odd N >= 3");
  }
  if (config.n_chains < 1 || config.n_samples < std::uint64_t(config.n_chains)) {
    throw std::invalid_argument("need at least one sample per chain");
  }
  measured_count(config.theta_step_deg);

  const auto n_chains = static_cast<std::size_t>(config.n_chains);
  std::vector<std::vector<CorrectionBatch>> per_chain(n_chains);
  auto samples_for = [&](std::size_t c) {
    return config.n_samples / n_chains + (c < config.n_samples % n_chains ? 1 : 0);
  };
  const auto n_threads = static_cast<std::size_t>(std::clamp(config.threads, 1, config.n_chains));
  if (n_threads == 1) {
    for (std::size_t c = 0; c < n_chains; ++c) per_chain[c] = run_one_chain(config, int(c), samples_for(c));
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t c = t; c < n_chains; c += n_threads) per_chain[c] = run_one_chain(config, int(c), samples_for(c));
      });
    }
    for (auto& th : pool) th.join();
  }
  std::vector<CorrectionBatch> all;
  for (auto& v : per_chain) std::move(v.begin(), v.end(), std::back_inserter(all));
  return CorrectionTable(config, std::move(all));
}

CorrectionTable estimate_p2(const CorrectionConfig& config) {
  CorrectionConfig c = config;
  c.which = CorrectionKind::cut_curve;
  return estimate_correction(c);
}

CorrectionTable estimate_p1(const CorrectionConfig& config) {
  CorrectionConfig c = config;
  c.which = CorrectionKind::stopped;
  return estimate_correction(c);
}

LatticeCorrection::LatticeCorrection(std::vector<double> theta_deg, std::vector<double> values,
                                     std::vector<double> stderrs)
    : theta_(std::move(theta_deg)), values_(std::move(values)), stderr_(std::move(stderrs)) {
  if (theta_.size() < 2 || theta_.size() != values_.size()) throw std::invalid_argument("correction grid mismatch");
  if (!stderr_.empty() && stderr_.size() != theta_.size()) throw std::invalid_argument("correction error mismatch");
  if (std::abs(theta_.front()) > 1e-9 || std::abs(theta_.back() - 90.0) > 1e-9) {
    throw std::invalid_argument("correction grid must cover [0, 90] degrees");
  }
  for (std::size_t k = 1; k < theta_.size(); ++k) {
    if (!(theta_[k] > theta_[k - 1])) throw std::invalid_argument("correction grid must ascend");
  }
}

LatticeCorrection LatticeCorrection::flat() { return LatticeCorrection({0.0, 90.0}, {1.0, 1.0}); }

LatticeCorrection LatticeCorrection::from_table(const CorrectionTable& table, bool normalized) {
  std::vector<double> th;
  std::vector<double> v;
  std::vector<double> e;
  for (const auto& r : table.rows()) {
    th.push_back(r.theta_deg);
    v.push_back(normalized ? r.l_normalized : r.l);
    e.push_back(normalized && r.l > 0 ? r.l_stderr * r.l_normalized / r.l : r.l_stderr);
  }
  return LatticeCorrection(std::move(th), std::move(v), std::move(e));
}

LatticeCorrection LatticeCorrection::read_csv(const std::filesystem::path& path, bool normalized) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::string line;
  std::getline(in, line);
  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    return cells;
  };
  const auto header = split(line);
  auto column = [&](std::string_view name) -> std::ptrdiff_t {
    const auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : it - header.begin();
  };
  const auto ct = column("theta_deg");
  const auto cl = column(normalized ? "l_normalized" : "l");
  const auto ce = column("l_stderr");
  if (ct < 0 || cl < 0) throw std::runtime_error("correction CSV lacks theta_deg / l columns");
  std::vector<double> th;
  std::vector<double> v;
  std::vector<double> e;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    th.push_back(std::stod(cells.at(std::size_t(ct))));
    v.push_back(std::stod(cells.at(std::size_t(cl))));
    if (ce >= 0) e.push_back(std::stod(cells.at(std::size_t(ce))));
  }
  if (normalized) e.clear();
  return LatticeCorrection(std::move(th), std::move(v), std::move(e));
}

double LatticeCorrection::operator()(double theta_deg) const {
  const double x = wrap_angle(theta_deg, 90.0);
  const auto it = std::upper_bound(theta_.begin(), theta_.end(), x);
  const auto hi = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(it - theta_.begin(), 1, std::ptrdiff_t(theta_.size()) - 1));
  const std::size_t lo = hi - 1;
  const double w = (x - theta_[lo]) / (theta_[hi] - theta_[lo]);
  return values_[lo] + w * (values_[hi] - values_[lo]);
}

double LatticeCorrection::stderr_at(double theta_deg) const {
  if (stderr_.empty()) return 0.0;
  const double x = wrap_angle(theta_deg, 90.0);
  const auto it = std::upper_bound(theta_.begin(), theta_.end(), x);
  const auto hi = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(it - theta_.begin(), 1, std::ptrdiff_t(theta_.size()) - 1));
  const std::size_t lo = hi - 1;
  const double w = (x - theta_[lo]) / (theta_[hi] - theta_[lo]);
  return stderr_[lo] + w * (stderr_[hi] - stderr_[lo]);
}

double LatticeCorrection::mean() const {
  double area = 0.0;
  for (std::size_t k = 1; k < theta_.size(); ++k) area += 0.5 * (values_[k] + values_[k - 1]) * (theta_[k] - theta_[k - 1]);
  return area / 90.0;
}

LatticeCorrection assemble_l(const CorrectionTable& table, bool normalized) {
  if (table.rows().empty()) throw std::invalid_argument("correction table has no rows");
  return LatticeCorrection::from_table(table, normalized);
}

}  // namespace sawlab
