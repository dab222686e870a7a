#include "robust/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "robust/errors.hpp"
#include "robust/orderstats.hpp"

namespace robust {

namespace {

void require_rows(const Sample& sample) {
  if (sample.size() < 1) throw InsufficientDataError("empty sample");
}

Eigen::Index ceil_count(double eps, Eigen::Index n) {
  if (!(eps >= 0.0) || !(eps < 1.0))
    throw DomainError("contamination level must lie in [0, 1)");
  const double scaled = eps * static_cast<double>(n);
  return static_cast<Eigen::Index>(std::ceil(scaled - 1e-9));
}

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

}  // namespace

Eigen::VectorXd sample_mean(const Sample& sample) {
  require_rows(sample);
  return sample.rows.colwise().sum().transpose() /
         static_cast<double>(sample.size());
}

Eigen::VectorXd coord_median(const Sample& sample) {
  require_rows(sample);
  const Eigen::Index n = sample.size();
  Eigen::VectorXd out(sample.dim());
  std::vector<double> coord(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < sample.dim(); ++j) {
    for (Eigen::Index i = 0; i < n; ++i)
      coord[static_cast<std::size_t>(i)] = sample.rows(i, j);
    out(j) = median_inplace(coord);
  }
  return out;
}

Eigen::VectorXd geometric_median(const Sample& sample, double tol,
                                 int max_iters) {
  require_rows(sample);
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
  if (max_iters < 1) throw DomainError("need at least one iteration");

  const Eigen::Index n = sample.size();
  Eigen::VectorXd y = coord_median(sample);
  // Data points within this distance of the iterate count as anchors; plain
  // Weiszfeld would divide by zero there and silently pin the iterate to a
  // vertex, so anchors get the Vardi-Zhang treatment below instead.
  const double ridge =
      1e-12 * (1.0 + sample.rows.rowwise().norm().maxCoeff());
  Eigen::VectorXd target(sample.dim());
  Eigen::VectorXd pull(sample.dim());
  for (int it = 0; it < max_iters; ++it) {
    target.setZero();
    pull.setZero();
    double weight_total = 0.0;
    double anchors = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::VectorXd diff = sample.rows.row(i).transpose() - y;
      const double dist = diff.norm();
      if (dist <= ridge) {
        anchors += 1.0;
        continue;
      }
      const double w = 1.0 / dist;
      target.noalias() += w * sample.rows.row(i).transpose();
      pull.noalias() += w * diff;
      weight_total += w;
    }
    // Every point sits at the iterate: it is the minimizer.
    if (weight_total == 0.0) break;
    const double pull_norm = pull.norm();
    Eigen::VectorXd next = target / weight_total;
    if (anchors > 0.0) {
      // Anchored iterate is optimal once the pull of the remaining points is
      // absorbed by the anchors' unit subgradient balls.
      if (pull_norm <= anchors) break;
      const double mix = anchors / pull_norm;
      next = (1.0 - mix) * next + mix * y;
    }
    const double step = (next - y).norm();
    y = next;
    if (step <= tol * (1.0 + y.norm())) break;
  }
  return y;
}

Eigen::VectorXd trimmed_mean(const Sample& sample, double eps) {
  require_rows(sample);
  if (!(eps >= 0.0) || eps >= 1.0)
    throw DomainError("contamination level must lie in [0, 1)");
  const Eigen::Index n = sample.size();
  const double rate = std::min(eps + 0.02, 0.45);
  const Eigen::Index side = ceil_count(rate, n);
  if (2 * side >= n) throw BudgetError("trim fraction leaves no rows");

  Eigen::VectorXd out(sample.dim());
  std::vector<double> coord(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < sample.dim(); ++j) {
    for (Eigen::Index i = 0; i < n; ++i)
      coord[static_cast<std::size_t>(i)] = sample.rows(i, j);
    std::sort(coord.begin(), coord.end());
    double total = 0.0;
    for (Eigen::Index i = side; i < n - side; ++i)
      total += coord[static_cast<std::size_t>(i)];
    out(j) = total / static_cast<double>(n - 2 * side);
  }
  return out;
}

SpdMatrix sample_cov(const Sample& sample) {
  require_rows(sample);
  Eigen::MatrixXd second = sample.rows.transpose() * sample.rows;
  second /= static_cast<double>(sample.size());
  return SpdMatrix(second);
}

SpdMatrix trimmed_cov(const Sample& sample, double eps) {
  require_rows(sample);
  const Eigen::Index n = sample.size();
  const Eigen::Index drop = ceil_count(eps, n);
  if (drop >= n) throw BudgetError("norm trimming would remove every row");

  const std::vector<Eigen::Index> order = by_norm_desc(sample.rows);
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(sample.dim(), sample.dim());
  for (Eigen::Index r = drop; r < n; ++r)
    g.noalias() +=
        sample.rows.row(order[static_cast<std::size_t>(r)]).transpose() *
        sample.rows.row(order[static_cast<std::size_t>(r)]);
  g /= static_cast<double>(n - drop);
  return SpdMatrix(g);
}

}  // namespace robust
