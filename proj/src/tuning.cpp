#include "robust/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <numeric>
#include <vector>

#include "robust/errors.hpp"
#include "robust/normal.hpp"
#include "robust/orderstats.hpp"

namespace robust {

namespace {

// Row indices ordered by squared norm descending, index ascending on ties,
// so removals are deterministic.
std::vector<Eigen::Index> by_norm_desc(const Eigen::MatrixXd& rows) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(rows.rows()));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  const Eigen::VectorXd sq = rows.rowwise().squaredNorm();
  std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
    if (sq(a) != sq(b)) return sq(a) > sq(b);
    return a < b;
  });
  return idx;
}

Eigen::Index ceil_count(double eps, Eigen::Index n) {
  if (!(eps >= 0.0) || !(eps < 1.0))
    throw DomainError("contamination level must lie in [0, 1)");
  const double scaled = eps * static_cast<double>(n);
  return static_cast<Eigen::Index>(std::ceil(scaled - 1e-9));
}

double mad(std::vector<double>& values) {
  const double med = median_inplace(values);
  for (double& v : values) v = std::fabs(v - med);
  return median_inplace(values);
}

}  // namespace

SpdMatrix construct_G(const Sample& sample, double eps) {
  const Eigen::Index n = sample.size();
  if (n < 1) throw InsufficientDataError("need at least one row");
  const Eigen::Index drop = ceil_count(eps, n);
  if (drop >= n)
    throw BudgetError("norm trimming would remove every row");

  const std::vector<Eigen::Index> order = by_norm_desc(sample.rows);
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(sample.dim(), sample.dim());
  for (Eigen::Index r = drop; r < n; ++r)
    g.noalias() += sample.rows.row(order[static_cast<std::size_t>(r)]).transpose() *
                   sample.rows.row(order[static_cast<std::size_t>(r)]);
  g /= static_cast<double>(n);
  return SpdMatrix(g);
}

double robust_trace(const Sample& sample, double eps) {
  const Eigen::Index n = sample.size();
  if (n < 20) throw InsufficientDataError("need at least 20 rows");
  const double rate = std::max(2.0 * eps, 0.02);
  const Eigen::Index side = ceil_count(rate, n);
  if (2 * side >= n)
    throw BudgetError("trim fraction leaves no rows");

  std::vector<double> sq(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i)
    sq[static_cast<std::size_t>(i)] = sample.rows.row(i).squaredNorm();
  std::sort(sq.begin(), sq.end());
  double total = 0.0;
  for (Eigen::Index i = side; i < n - side; ++i)
    total += sq[static_cast<std::size_t>(i)];
  return total / static_cast<double>(n - 2 * side);
}

double robust_opnorm(const Sample& sample, const SphereNet& net) {
  if (sample.size() < 1) throw InsufficientDataError("need at least one row");
  if (net.size() < 1) throw DomainError("empty sphere net");
  if (net.dim() != sample.dim())
    throw DomainError("net dimension does not match sample");

  double best = 0.0;
  std::vector<double> proj(static_cast<std::size_t>(sample.size()));
  for (Eigen::Index k = 0; k < net.size(); ++k) {
    const Eigen::VectorXd p = sample.rows * net.directions.row(k).transpose();
    for (Eigen::Index i = 0; i < sample.size(); ++i)
      proj[static_cast<std::size_t>(i)] = p(i);
    const double scale = mad(proj) / kNormalUpperQuartile;
    best = std::max(best, scale * scale);
  }
  return best;
}

double estimate_alpha(const Sample& sample, const SpdMatrix& h) {
  if (sample.size() < 20) throw InsufficientDataError("need at least 20 rows");
  if (h.dim() != sample.dim())
    throw DomainError("matrix dimension does not match sample");

  const Eigen::MatrixXd mapped = sample.rows * h.sqrt();
  std::vector<double> coord(static_cast<std::size_t>(sample.size()));
  double total = 0.0;
  for (Eigen::Index j = 0; j < mapped.cols(); ++j) {
    for (Eigen::Index i = 0; i < mapped.rows(); ++i) {
      const double y = mapped(i, j);
      coord[static_cast<std::size_t>(i)] = y * y;
    }
    total += median_inplace(coord);
  }
  return total / (kNormalUpperQuartile * kNormalUpperQuartile);
}

std::string TunedParams::to_json() const {
  nlohmann::json j;
  nlohmann::json rows = nlohmann::json::array();
  const Eigen::MatrixXd& g = G.mat();
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < g.cols(); ++c) row.push_back(g(i, c));
    rows.push_back(row);
  }
  j["G"] = rows;
  j["d"] = g.rows();
  j["tau"] = tau;
  j["omega"] = omega;
  j["beta"] = beta;
  j["alpha"] = alpha;
  return j.dump(2);
}

TunedParams TunedParams::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad tuned-parameter JSON: ") + e.what());
  }
  TunedParams out;
  try {
    const Eigen::Index d = j.at("d").get<Eigen::Index>();
    Eigen::MatrixXd g(d, d);
    const nlohmann::json& rows = j.at("G");
    if (static_cast<Eigen::Index>(rows.size()) != d)
      throw ConfigError("tuned-parameter G has wrong row count");
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index c = 0; c < d; ++c)
        g(i, c) = rows.at(static_cast<std::size_t>(i))
                      .at(static_cast<std::size_t>(c))
                      .get<double>();
    out.G = SpdMatrix(g);
    out.tau = j.at("tau").get<double>();
    out.omega = j.at("omega").get<double>();
    out.beta = j.at("beta").get<int>();
    out.alpha = j.at("alpha").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad tuned-parameter JSON: ") + e.what());
  }
  if (out.beta < 1) throw ConfigError("tuned beta must be a positive integer");
  return out;
}

}  // namespace robust
