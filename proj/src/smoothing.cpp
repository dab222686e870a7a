#include "robust/smoothing.hpp"

#include <cmath>

#include "robust/errors.hpp"
#include "robust/orderstats.hpp"
#include "robust/parallel.hpp"

namespace robust {

Eigen::MatrixXd whitened_direction_draws(const Eigen::MatrixXd& rows,
                                         int draws, RngStream rng) {
  if (rows.rows() < 1) throw InsufficientDataError("need at least one row");
  if (draws < 1) throw DomainError("need at least one draw");

  const Eigen::Index n = rows.rows();
  const Eigen::Index d = rows.cols();
  const int pairs = (draws + 1) / 2;

  const Eigen::RowVectorXd mean = rows.colwise().mean();
  const Eigen::MatrixXd centered = rows.rowwise() - mean;

  // Pseudo-inverse square root of the centered gram; eigenvalues below a
  // relative floor count as exact zeros so degenerate samples stay valid.
  const Eigen::MatrixXd gram = centered.transpose() * centered;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
      (gram + gram.transpose()) / 2.0);
  if (eig.info() != Eigen::Success)
    throw InvalidModelError("eigendecomposition of the data gram failed");
  const Eigen::VectorXd& lam = eig.eigenvalues();
  const double floor = 1e-12 * std::max(lam.cwiseAbs().maxCoeff(), 1e-300);
  Eigen::VectorXd inv_sqrt(d);
  for (Eigen::Index i = 0; i < d; ++i)
    inv_sqrt(i) = lam(i) > floor ? 1.0 / std::sqrt(lam(i)) : 0.0;
  const Eigen::MatrixXd whiten = eig.eigenvectors() *
                                 inv_sqrt.asDiagonal() *
                                 eig.eigenvectors().transpose();

  Eigen::MatrixXd out(d, 2 * pairs);
  Eigen::VectorXd w(n);
  for (int p = 0; p < pairs; ++p) {
    for (Eigen::Index i = 0; i < n; ++i) w(i) = rng.next_normal();
    const Eigen::VectorXd g = whiten * (centered.transpose() * w);
    out.col(2 * p) = g;
    out.col(2 * p + 1) = -g;
  }
  return out;
}

SmoothingDraws SmoothingDraws::build(const Eigen::MatrixXd& rows, double beta,
                                     int draws, RngStream rng) {
  if (!(beta > 0.0) || !std::isfinite(beta))
    throw DomainError("smoothing inverse-variance must be positive");
  const Eigen::MatrixXd dirs = whitened_direction_draws(rows, draws, rng);
  SmoothingDraws out;
  out.offsets_ = (rows * dirs) / std::sqrt(beta);
  return out;
}

double smoothed_median_eval(const Eigen::MatrixXd& rows,
                            const SmoothingDraws& draws,
                            const Eigen::VectorXd& v,
                            std::vector<double>& scratch) {
  const Eigen::Index n = rows.rows();
  const Eigen::VectorXd proj = rows * v;
  const Eigen::MatrixXd& xi = draws.offsets();
  std::vector<double> medians(static_cast<std::size_t>(xi.cols()));
  for (Eigen::Index j = 0; j < xi.cols(); ++j) {
    for (Eigen::Index i = 0; i < n; ++i)
      scratch[static_cast<std::size_t>(i)] = proj(i) + xi(i, j);
    medians[static_cast<std::size_t>(j)] = median_inplace(scratch);
  }
  return pairwise_sum(medians.data(),
                      static_cast<std::int64_t>(medians.size())) /
         static_cast<double>(medians.size());
}

}  // namespace robust
