#include "robust/spd.hpp"

#include <cmath>
#include <utility>

#include "robust/errors.hpp"

namespace robust {

namespace {
constexpr double kClipWindow = 1e-10;    // relative eigenvalue clip threshold
constexpr double kSymmetryTol = 1e-12;   // relative asymmetry rejection
}  // namespace

SpdMatrix::SpdMatrix(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw InvalidModelError("SpdMatrix: matrix must be square and nonempty");
  }
  const double scale = m.cwiseAbs().maxCoeff();
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryTol * (1.0 + scale)) {
    throw InvalidModelError("SpdMatrix: input is not symmetric");
  }
  mat_ = 0.5 * (m + m.transpose());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(mat_);
  if (eig.info() != Eigen::Success) {
    throw InvalidModelError("SpdMatrix: eigendecomposition failed");
  }
  evals_ = eig.eigenvalues();
  evecs_ = eig.eigenvectors();

  const double norm = evals_.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < evals_.size(); ++i) {
    if (evals_(i) < 0.0) {
      if (evals_(i) < -kClipWindow * norm) {
        throw InvalidModelError("SpdMatrix: eigenvalue below the PSD clipping window");
      }
      evals_(i) = 0.0;
    }
  }
  const Eigen::MatrixXd root =
      evecs_ * evals_.cwiseSqrt().asDiagonal() * evecs_.transpose();
  sqrt_ = 0.5 * (root + root.transpose());
}

SpdMatrix SpdMatrix::identity(Eigen::Index d) {
  return SpdMatrix(Eigen::MatrixXd::Identity(d, d));
}

SpdMatrix SpdMatrix::zero(Eigen::Index d) {
  return SpdMatrix(Eigen::MatrixXd::Zero(d, d));
}

SpdMatrix SpdMatrix::diagonal(const Eigen::VectorXd& diag) {
  return SpdMatrix(Eigen::MatrixXd(diag.asDiagonal()));
}

double SpdMatrix::effective_rank() const {
  const double op = opnorm();
  if (op == 0.0) return 0.0;
  return trace() / op;
}

GaussianModel::GaussianModel(Eigen::VectorXd mean_in, SpdMatrix cov_in)
    : mean(std::move(mean_in)), cov(std::move(cov_in)) {
  if (mean.size() != cov.dim()) {
    throw InvalidModelError("GaussianModel: mean and covariance dimensions differ");
  }
}

}  // namespace robust
