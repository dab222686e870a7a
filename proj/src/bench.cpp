#include "robust/bench.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "robust/baselines.hpp"
#include "robust/cov_estimator.hpp"
#include "robust/distributions.hpp"
#include "robust/errors.hpp"
#include "robust/mean_estimator.hpp"
#include "robust/normal.hpp"
#include "robust/orderstats.hpp"
#include "robust/parallel.hpp"
#include "robust/rng.hpp"

namespace robust {

namespace {

const std::array<const char*, 5> kMeanNames = {
    "coord_median", "geometric_median", "sample_mean", "smoothmed",
    "trimmed_mean"};
const std::array<const char*, 3> kCovNames = {"sample_cov", "smoothcov",
                                              "trimmed_cov"};

std::string scenario_name(Scenario s) {
  switch (s) {
    case Scenario::kMean: return "mean";
    case Scenario::kCov: return "cov";
    case Scenario::kConcentration: return "concentration";
    case Scenario::kSweep: return "sweep";
  }
  return "?";
}

double opnorm_of_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a - b,
                                                    Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

bool is_mean_estimator(const std::string& name) {
  return std::find(kMeanNames.begin(), kMeanNames.end(), name) !=
         kMeanNames.end();
}

bool is_cov_estimator(const std::string& name) {
  return std::find(kCovNames.begin(), kCovNames.end(), name) != kCovNames.end();
}

void ExperimentConfig::validate() const {
  if (grid_n.empty()) throw ConfigError("N grid is empty");
  if (grid_d.empty()) throw ConfigError("d grid is empty");
  if (grid_eps.empty()) throw ConfigError("eps grid is empty");
  for (int n : grid_n)
    if (n < 1) throw ConfigError("N must be >= 1");
  for (int d : grid_d)
    if (d < 1) throw ConfigError("d must be >= 1");
  for (double e : grid_eps)
    if (!(e >= 0.0) || e >= 0.5)
      throw ConfigError("eps must lie in [0, 0.5)");
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (!(delta > 0.0) || delta >= 1.0)
    throw ConfigError("delta must lie in (0, 1)");
  if (dist != "gaussian" && dist != "half_normal" && dist != "chi2_1")
    throw ConfigError("dist must be gaussian, half_normal, or chi2_1");

  const Eigen::Index sd = sigma_diag.size();
  if (sd > 1)
    for (int d : grid_d)
      if (d != sd)
        throw ConfigError("sigma has " + std::to_string(sd) +
                          " entries but the d grid asks for d=" +
                          std::to_string(d));
  for (Eigen::Index i = 0; i < sd; ++i)
    if (!(sigma_diag(i) >= 0.0)) throw ConfigError("sigma entries must be >= 0");
  if (mu.size() > 0)
    for (int d : grid_d)
      if (d != mu.size())
        throw ConfigError("mu has " + std::to_string(mu.size()) +
                          " entries but the d grid asks for d=" +
                          std::to_string(d));

  bool any_cov = false;
  for (std::size_t i = 0; i < estimators.size(); ++i) {
    const std::string& e = estimators[i];
    const bool m = is_mean_estimator(e), c = is_cov_estimator(e);
    if (!m && !c) throw ConfigError("unknown estimator: " + e);
    if (i > 0 && estimators[i - 1] == e)
      throw ConfigError("duplicate estimator: " + e);
    if (scenario == Scenario::kMean && !m)
      throw ConfigError("estimator " + e + " is not a mean estimator");
    if (scenario == Scenario::kCov && !c)
      throw ConfigError("estimator " + e + " is not a covariance estimator");
    any_cov = any_cov || c;
  }
  if (scenario != Scenario::kConcentration && estimators.empty())
    throw ConfigError("no estimators configured");
  if (any_cov && mu.size() > 0 && mu.norm() > 0.0)
    throw ConfigError(
        "covariance estimators assume a zero-mean model; drop mu");
}

namespace {

long long parse_ll(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const long long x = std::strtoll(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0')
    throw ConfigError(key + ": not an integer: " + v);
  return x;
}

double parse_dbl(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0')
    throw ConfigError(key + ": not a number: " + v);
  return x;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  std::size_t b = s.find_last_not_of(" \t\r");
  return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

void append_coord(Eigen::VectorXd& v, double x) {
  v.conservativeResize(v.size() + 1);
  v(v.size() - 1) = x;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  // List-valued keys replace their default on first occurrence.
  bool saw_n = false, saw_d = false, saw_eps = false;

  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) +
                        ": expected key=value, got: " + line);
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    if (val.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": empty value for " +
                        key);

    if (key == "scenario") {
      if (val == "mean") cfg.scenario = Scenario::kMean;
      else if (val == "cov") cfg.scenario = Scenario::kCov;
      else if (val == "concentration") cfg.scenario = Scenario::kConcentration;
      else if (val == "sweep") cfg.scenario = Scenario::kSweep;
      else throw ConfigError("scenario: unknown value " + val);
    } else if (key == "N") {
      if (!saw_n) { cfg.grid_n.clear(); saw_n = true; }
      cfg.grid_n.push_back(static_cast<int>(parse_ll(key, val)));
    } else if (key == "d") {
      if (!saw_d) { cfg.grid_d.clear(); saw_d = true; }
      cfg.grid_d.push_back(static_cast<int>(parse_ll(key, val)));
    } else if (key == "eps") {
      if (!saw_eps) { cfg.grid_eps.clear(); saw_eps = true; }
      cfg.grid_eps.push_back(parse_dbl(key, val));
    } else if (key == "trials") {
      cfg.trials = static_cast<int>(parse_ll(key, val));
    } else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(parse_ll(key, val));
    } else if (key == "estimator") {
      cfg.estimators.push_back(val);
    } else if (key == "adversary") {
      if (val == "huber") cfg.adversary.kind = AdversaryKind::kHuber;
      else if (val == "shift") cfg.adversary.kind = AdversaryKind::kShift;
      else if (val == "cluster") cfg.adversary.kind = AdversaryKind::kCluster;
      else if (val == "median_tilt")
        cfg.adversary.kind = AdversaryKind::kMedianTilt;
      else throw ConfigError("adversary: unknown value " + val);
    } else if (key == "adversary_center") {
      append_coord(cfg.adversary.center, parse_dbl(key, val));
    } else if (key == "adversary_direction") {
      append_coord(cfg.adversary.direction, parse_dbl(key, val));
    } else if (key == "adversary_magnitude") {
      cfg.adversary.magnitude = parse_dbl(key, val);
    } else if (key == "adversary_scale") {
      cfg.adversary.outlier_scale = parse_dbl(key, val);
    } else if (key == "adversary_tilt") {
      cfg.adversary.tilt_offset_rel = parse_dbl(key, val);
    } else if (key == "mu") {
      append_coord(cfg.mu, parse_dbl(key, val));
    } else if (key == "sigma") {
      append_coord(cfg.sigma_diag, parse_dbl(key, val));
    } else if (key == "delta") {
      cfg.delta = parse_dbl(key, val);
    } else if (key == "dist") {
      cfg.dist = val;
    } else if (key == "timing") {
      if (val == "wallclock") cfg.wallclock = true;
      else if (val == "none") cfg.wallclock = false;
      else throw ConfigError("timing: unknown value " + val);
    } else if (key == "out") {
      cfg.out_dir = val;
    } else {
      throw ConfigError("line " + std::to_string(lineno) + ": unknown key " +
                        key);
    }
  }
  std::sort(cfg.estimators.begin(), cfg.estimators.end());
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

bool ResultRow::operator==(const ResultRow& o) const {
  const auto deq = [](double a, double b) {
    return (std::isnan(a) && std::isnan(b)) || a == b;
  };
  return scenario == o.scenario && estimator == o.estimator && n == o.n &&
         d == o.d && deq(eps, o.eps) && trial == o.trial &&
         deq(error, o.error) && deq(runtime_ms, o.runtime_ms) &&
         seed == o.seed && tag == o.tag;
}

namespace {

// Runs one estimator on prepared data; throws on estimator failure.
double score_estimator(const std::string& name, const Sample& dirty,
                       double eps, double delta, const Eigen::VectorXd& mu,
                       const Eigen::MatrixXd& sigma, RngStream est_rng) {
  if (name == "sample_mean") return (sample_mean(dirty) - mu).norm();
  if (name == "coord_median") return (coord_median(dirty) - mu).norm();
  if (name == "geometric_median")
    return (geometric_median(dirty, 1e-8) - mu).norm();
  if (name == "trimmed_mean") return (trimmed_mean(dirty, eps) - mu).norm();
  if (name == "smoothmed") {
    SmoothMedConfig mc;
    mc.beta = tune_beta_mean(dirty, eps, delta);
    mc.net = default_mean_net(dirty.dim());
    mc.seed = est_rng;
    const EstimatorReport rep = estimate_mean(dirty, eps, delta, mc);
    return (rep.estimate_vector - mu).norm();
  }
  if (name == "sample_cov")
    return opnorm_of_diff(sample_cov(dirty).mat(), sigma);
  if (name == "trimmed_cov")
    return opnorm_of_diff(trimmed_cov(dirty, eps).mat(), sigma);
  if (name == "smoothcov") {
    CovarianceConfig cc;
    cc.seed = est_rng;
    const auto [est, rep] = estimate_covariance(dirty, eps, delta, cc);
    return opnorm_of_diff(est.mat(), sigma);
  }
  throw ConfigError("unknown estimator: " + name);
}

double population_quantile(const std::string& dist, double p) {
  if (dist == "gaussian") return std_normal_quantile(p);
  if (dist == "half_normal") return half_normal_quantile(p);
  return chi2_1_quantile(p);
}

}  // namespace

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg_in,
                                      int threads) {
  ExperimentConfig cfg = cfg_in;
  if (cfg.scenario == Scenario::kConcentration)
    cfg.grid_d = {1};  // rows are univariate; a wider grid would duplicate keys
  if (cfg.estimators.empty()) {
    if (cfg.scenario == Scenario::kCov)
      cfg.estimators = {"sample_cov", "smoothcov"};
    else if (cfg.scenario != Scenario::kConcentration)
      cfg.estimators = {"sample_mean", "smoothmed"};
  }
  std::sort(cfg.estimators.begin(), cfg.estimators.end());
  cfg.validate();
  threads = resolve_threads(threads);

  const std::string scen = scenario_name(cfg.scenario);
  const std::int64_t n_d = static_cast<std::int64_t>(cfg.grid_d.size());
  const std::int64_t n_n = static_cast<std::int64_t>(cfg.grid_n.size());
  const std::int64_t n_e = static_cast<std::int64_t>(cfg.grid_eps.size());
  const std::int64_t slots = n_d * n_n * n_e * cfg.trials;
  const std::int64_t per_slot =
      cfg.scenario == Scenario::kConcentration
          ? 1
          : static_cast<std::int64_t>(cfg.estimators.size());

  std::vector<ResultRow> rows(static_cast<std::size_t>(slots * per_slot));
  const RngStream root(cfg.seed, 0);

  parallel_for(slots, threads, [&](std::int64_t slot) {
    const std::int64_t trial = slot % cfg.trials;
    std::int64_t pt = slot / cfg.trials;
    const std::int64_t ei = pt % n_e;
    pt /= n_e;
    const std::int64_t ni = pt % n_n;
    const std::int64_t di = pt / n_n;
    const int d = cfg.grid_d[static_cast<std::size_t>(di)];
    const int n = cfg.grid_n[static_cast<std::size_t>(ni)];
    const double eps = cfg.grid_eps[static_cast<std::size_t>(ei)];
    const RngStream slot_rng = root.child(static_cast<std::uint64_t>(slot));

    ResultRow base;
    base.scenario = scen;
    base.n = n;
    base.d = d;
    base.eps = eps;
    base.trial = static_cast<int>(trial);
    base.seed = slot_rng.stream_id();

    if (cfg.scenario == Scenario::kConcentration) {
      base.d = 1;
      base.estimator = cfg.dist;
      RngStream data_rng = slot_rng.child(0);
      std::vector<double> xs(static_cast<std::size_t>(n));
      for (double& x : xs) {
        const double z = data_rng.next_normal();
        x = cfg.dist == "gaussian" ? z
            : cfg.dist == "half_normal" ? std::abs(z)
                                        : z * z;
      }
      const double q = quantile_inplace(xs, 0.5 + eps);
      base.error = std::abs(q - population_quantile(cfg.dist, 0.5 + eps));
      rows[static_cast<std::size_t>(slot)] = base;
      return;
    }

    const Eigen::VectorXd mu =
        cfg.mu.size() > 0 ? cfg.mu : Eigen::VectorXd::Zero(d);
    Eigen::VectorXd diag;
    if (cfg.sigma_diag.size() == 0)
      diag = Eigen::VectorXd::Ones(d);
    else if (cfg.sigma_diag.size() == 1)
      diag = Eigen::VectorXd::Constant(d, cfg.sigma_diag(0));
    else
      diag = cfg.sigma_diag;
    const SpdMatrix sigma = SpdMatrix::diagonal(diag);

    // One dataset per slot: every estimator sees the same rows, so the
    // per-trial comparisons are paired.
    Sample dirty;
    std::string data_tag;
    try {
      RngStream data_rng = slot_rng.child(0);
      Sample clean = sample_gaussian(GaussianModel(mu, sigma), n, data_rng);
      if (eps > 0.0) {
        AdversarySpec adv = cfg.adversary;
        adv.epsilon = eps;
        RngStream adv_rng = slot_rng.child(1);
        dirty = contaminate(clean, adv, adv_rng);
      } else {
        dirty = std::move(clean);
      }
    } catch (const std::exception& e) {
      data_tag = e.what();
    }

    for (std::int64_t k = 0; k < per_slot; ++k) {
      ResultRow row = base;
      row.estimator = cfg.estimators[static_cast<std::size_t>(k)];
      const auto t0 = std::chrono::steady_clock::now();
      try {
        if (!data_tag.empty()) throw ConfigError(data_tag);
        row.error = score_estimator(row.estimator, dirty, eps, cfg.delta, mu,
                                    sigma.mat(),
                                    slot_rng.child(2 + static_cast<std::uint64_t>(k)));
      } catch (const std::exception& e) {
        row.error = std::numeric_limits<double>::quiet_NaN();
        row.tag = e.what();
      }
      if (cfg.wallclock) {
        const auto t1 = std::chrono::steady_clock::now();
        row.runtime_ms =
            std::chrono::duration<double, std::milli>(t1 - t0).count();
      }
      rows[static_cast<std::size_t>(slot * per_slot + k)] = row;
    }
  });

  std::sort(rows.begin(), rows.end(), [](const ResultRow& a,
                                         const ResultRow& b) {
    return std::tie(a.scenario, a.estimator, a.n, a.d, a.eps, a.trial) <
           std::tie(b.scenario, b.estimator, b.n, b.d, b.eps, b.trial);
  });
  return rows;
}

namespace {

const char kCsvHeader[] =
    "scenario,estimator,N,d,eps,trial,error,runtime_ms,seed,tag";

std::string fmt_double(double x) {
  if (std::isnan(x)) return "NaN";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

std::string csv_string(const std::vector<ResultRow>& rows) {
  std::string out = kCsvHeader;
  out += '\n';
  char buf[64];
  for (const ResultRow& r : rows) {
    out += csv_quote(r.scenario);
    out += ',';
    out += csv_quote(r.estimator);
    std::snprintf(buf, sizeof buf, ",%d,%d,", r.n, r.d);
    out += buf;
    out += fmt_double(r.eps);
    std::snprintf(buf, sizeof buf, ",%d,", r.trial);
    out += buf;
    out += fmt_double(r.error);
    out += ',';
    out += fmt_double(r.runtime_ms);
    std::snprintf(buf, sizeof buf, ",%llu,",
                  static_cast<unsigned long long>(r.seed));
    out += buf;
    out += csv_quote(r.tag);
    out += '\n';
  }
  return out;
}

void emit_csv(const std::vector<ResultRow>& rows, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write csv: " + path);
  const std::string s = csv_string(rows);
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
  out.flush();
  if (!out) throw IoError("write failed: " + path);
}

namespace {

// Splits RFC-4180 text into records of fields, honoring quoted fields with
// doubled-quote escapes and embedded separators.
std::vector<std::vector<std::string>> csv_records(const std::string& text) {
  std::vector<std::vector<std::string>> recs;
  std::vector<std::string> rec;
  std::string field;
  bool quoted = false;
  std::size_t i = 0;
  const std::size_t n = text.size();
  auto end_field = [&] { rec.push_back(field); field.clear(); };
  auto end_record = [&] {
    end_field();
    recs.push_back(rec);
    rec.clear();
  };
  while (i < n) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < n && text[i + 1] == '"') {
          field += '"';
          i += 2;
          continue;
        }
        quoted = false;
        ++i;
        continue;
      }
      field += c;
      ++i;
      continue;
    }
    if (c == '"' && field.empty()) {
      quoted = true;
      ++i;
      continue;
    }
    if (c == ',') {
      end_field();
      ++i;
      continue;
    }
    if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < n && text[i + 1] == '\n') ++i;
      end_record();
      ++i;
      continue;
    }
    field += c;
    ++i;
  }
  if (quoted) throw IoError("csv: unterminated quoted field");
  if (!field.empty() || !rec.empty()) end_record();
  return recs;
}

double csv_double(const std::string& s) {
  if (s == "NaN") return std::numeric_limits<double>::quiet_NaN();
  char* end = nullptr;
  const double x = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0')
    throw IoError("csv: not a number: " + s);
  return x;
}

long long csv_ll(const std::string& s) {
  char* end = nullptr;
  const long long x = std::strtoll(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0')
    throw IoError("csv: not an integer: " + s);
  return x;
}

}  // namespace

std::vector<ResultRow> parse_csv_text(const std::string& text) {
  const auto recs = csv_records(text);
  if (recs.empty()) throw IoError("csv: empty input");
  {
    std::string header;
    for (std::size_t i = 0; i < recs[0].size(); ++i) {
      if (i) header += ',';
      header += recs[0][i];
    }
    if (header != kCsvHeader)
      throw IoError("csv: unexpected header: " + header);
  }
  std::vector<ResultRow> rows;
  for (std::size_t r = 1; r < recs.size(); ++r) {
    const auto& f = recs[r];
    if (f.size() != 10)
      throw IoError("csv: record " + std::to_string(r) + " has " +
                    std::to_string(f.size()) + " fields");
    ResultRow row;
    row.scenario = f[0];
    row.estimator = f[1];
    row.n = static_cast<int>(csv_ll(f[2]));
    row.d = static_cast<int>(csv_ll(f[3]));
    row.eps = csv_double(f[4]);
    row.trial = static_cast<int>(csv_ll(f[5]));
    row.error = csv_double(f[6]);
    row.runtime_ms = csv_double(f[7]);
    row.seed = static_cast<std::uint64_t>(std::strtoull(f[8].c_str(), nullptr, 10));
    row.tag = f[9];
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

double num_field(const ResultRow& r, const std::string& f) {
  if (f == "N") return r.n;
  if (f == "d") return r.d;
  if (f == "eps") return r.eps;
  if (f == "trial") return r.trial;
  if (f == "error") return r.error;
  if (f == "runtime_ms") return r.runtime_ms;
  if (f == "seed") return static_cast<double>(r.seed);
  throw DomainError("not a numeric field: " + f);
}

std::string str_field(const ResultRow& r, const std::string& f) {
  if (f == "scenario") return r.scenario;
  if (f == "estimator") return r.estimator;
  if (f == "tag") return r.tag;
  return fmt_double(num_field(r, f));
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '&') out += "&amp;";
    else if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '"') out += "&quot;";
    else out += c;
  }
  return out;
}

const std::array<const char*, 8> kPalette = {
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd",
    "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

}  // namespace

std::string svg_string(const std::vector<ResultRow>& rows,
                       const std::string& x_field, const std::string& y_field,
                       const std::string& group_field) {
  if (rows.empty()) throw DomainError("svg needs at least one row");

  // group -> x -> y values; NaN y drops the point.
  std::vector<std::string> group_order;
  std::map<std::string, std::map<double, std::vector<double>>> groups;
  for (const ResultRow& r : rows) {
    const double y = num_field(r, y_field);
    if (std::isnan(y)) continue;
    const double x = num_field(r, x_field);
    if (std::isnan(x)) continue;
    const std::string g = str_field(r, group_field);
    if (!groups.count(g)) group_order.push_back(g);
    groups[g][x].push_back(y);
  }

  struct Curve {
    std::string label;
    std::vector<std::pair<double, double>> pts;  // x ascending, y median
  };
  std::vector<Curve> curves;
  bool log_ok = true;
  double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
  bool any = false;
  for (const std::string& g : group_order) {
    Curve c;
    c.label = g;
    for (auto& [x, ys] : groups[g]) {
      const double y = median_inplace(ys);
      c.pts.emplace_back(x, y);
      if (!(x > 0.0) || !(y > 0.0)) log_ok = false;
      if (!any) {
        xmin = xmax = x;
        ymin = ymax = y;
        any = true;
      } else {
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
      }
    }
    if (!c.pts.empty()) curves.push_back(std::move(c));
  }

  const bool logscale = log_ok && any;
  auto tx = [&](double v) { return logscale ? std::log10(v) : v; };
  double lx0 = any ? tx(xmin) : 0.0, lx1 = any ? tx(xmax) : 1.0;
  double ly0 = any ? tx(ymin) : 0.0, ly1 = any ? tx(ymax) : 1.0;
  if (lx1 - lx0 < 1e-12) { lx0 -= 0.5; lx1 += 0.5; }
  if (ly1 - ly0 < 1e-12) { ly0 -= 0.5; ly1 += 0.5; }
  auto px = [&](double v) { return 70.0 + (tx(v) - lx0) / (lx1 - lx0) * 540.0; };
  auto py = [&](double v) { return 430.0 - (tx(v) - ly0) / (ly1 - ly0) * 390.0; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" "
         "height=\"480\" viewBox=\"0 0 640 480\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"640\" height=\"480\" fill=\"white\"/>\n"
      << "<line x1=\"70\" y1=\"430\" x2=\"610\" y2=\"430\" stroke=\"#333\"/>\n"
      << "<line x1=\"70\" y1=\"40\" x2=\"70\" y2=\"430\" stroke=\"#333\"/>\n";
  char buf[160];
  const char* suffix = logscale ? " (log)" : "";
  if (any) {
    std::snprintf(buf, sizeof buf,
                  "<text x=\"70\" y=\"448\" font-size=\"11\" "
                  "text-anchor=\"middle\">%.4g</text>\n",
                  xmin);
    svg << buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"610\" y=\"448\" font-size=\"11\" "
                  "text-anchor=\"middle\">%.4g</text>\n",
                  xmax);
    svg << buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"64\" y=\"434\" font-size=\"11\" "
                  "text-anchor=\"end\">%.4g</text>\n",
                  ymin);
    svg << buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"64\" y=\"44\" font-size=\"11\" "
                  "text-anchor=\"end\">%.4g</text>\n",
                  ymax);
    svg << buf;
  }
  svg << "<text x=\"340\" y=\"468\" font-size=\"12\" text-anchor=\"middle\">"
      << xml_escape(x_field) << suffix << "</text>\n"
      << "<text x=\"70\" y=\"24\" font-size=\"12\">" << xml_escape(y_field)
      << suffix << "</text>\n";

  for (std::size_t i = 0; i < curves.size(); ++i) {
    const char* color = kPalette[i % kPalette.size()];
    svg << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [x, y] : curves[i].pts) {
      std::snprintf(buf, sizeof buf, "%.6g,%.6g ", px(x), py(y));
      svg << buf;
    }
    svg << "\"/>\n";
    const double ly = 44.0 + 16.0 * static_cast<double>(i);
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"480\" y1=\"%.6g\" x2=\"500\" y2=\"%.6g\" "
                  "stroke=\"%s\" stroke-width=\"2\"/>\n",
                  ly - 4.0, ly - 4.0, color);
    svg << buf;
    svg << "<text x=\"506\" y=\"" << ly << "\" font-size=\"11\">"
        << xml_escape(curves[i].label) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void emit_svg_lines(const std::vector<ResultRow>& rows,
                    const std::string& x_field, const std::string& y_field,
                    const std::string& group_field, const std::string& path) {
  const std::string s = svg_string(rows, x_field, y_field, group_field);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write svg: " + path);
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
  out.flush();
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace robust
