#pragma once

#include <Eigen/Dense>

namespace robust {

// Symmetric positive semidefinite matrix with an eagerly computed
// eigendecomposition and symmetric square root.
//
// Eigenvalues inside the clipping window [-1e-10 * opnorm, 0] are set to
// zero at construction (roundoff from sums of outer products lands there);
// anything more negative rejects the input. Construction symmetrizes
// exactly, so mat()(i,j) == mat()(j,i) bitwise. All accessors are const and
// the caches are built eagerly, making instances safe to share across
// threads.
class SpdMatrix {
 public:
  explicit SpdMatrix(const Eigen::MatrixXd& m);

  static SpdMatrix identity(Eigen::Index d);
  static SpdMatrix zero(Eigen::Index d);
  static SpdMatrix diagonal(const Eigen::VectorXd& diag);

  Eigen::Index dim() const { return mat_.rows(); }
  const Eigen::MatrixXd& mat() const { return mat_; }

  // Symmetric square root: sqrt() * sqrt() reproduces mat() up to roundoff.
  const Eigen::MatrixXd& sqrt() const { return sqrt_; }

  // Ascending, after clipping; all entries nonnegative.
  const Eigen::VectorXd& eigenvalues() const { return evals_; }
  const Eigen::MatrixXd& eigenvectors() const { return evecs_; }

  double trace() const { return mat_.trace(); }
  double opnorm() const { return evals_.size() ? evals_(evals_.size() - 1) : 0.0; }

  // trace / opnorm. Ranges over [1, dim]; defined as 0 for the zero matrix.
  double effective_rank() const;

 private:
  Eigen::MatrixXd mat_;
  Eigen::VectorXd evals_;
  Eigen::MatrixXd evecs_;
  Eigen::MatrixXd sqrt_;
};

// Mean vector plus covariance; the ground-truth description of a clean
// sampling distribution.
struct GaussianModel {
  Eigen::VectorXd mean;
  SpdMatrix cov;

  GaussianModel(Eigen::VectorXd mean_in, SpdMatrix cov_in);
  Eigen::Index dim() const { return mean.size(); }
};

}  // namespace robust
