#include "robust/distributions.hpp"

#include <cmath>

#include "robust/errors.hpp"

namespace robust {

namespace {

// Fixed draw budget per row (no rejection), so sample determinism is a pure
// function of the stream position.
void unit_direction_into(Eigen::VectorXd& u, RngStream& rng) {
  for (Eigen::Index j = 0; j < u.size(); ++j) u(j) = rng.next_normal();
  const double norm = u.norm();
  if (norm == 0.0) {
    u.setZero();
    u(0) = 1.0;  // probability ~2^-53d; keeps the draw count fixed
  } else {
    u /= norm;
  }
}

}  // namespace

Eigen::VectorXd unit_direction(Eigen::Index d, RngStream& rng) {
  if (d < 1) throw DomainError("unit_direction: dimension must be positive");
  Eigen::VectorXd u(d);
  unit_direction_into(u, rng);
  return u;
}

Sample sample_gaussian(const GaussianModel& model, Eigen::Index n, RngStream& rng) {
  if (n < 1) throw DomainError("sample_gaussian: n must be positive");
  const Eigen::Index d = model.dim();
  const Eigen::MatrixXd& root = model.cov.sqrt();
  Sample out;
  out.rows.resize(n, d);
  Eigen::VectorXd z(d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) z(j) = rng.next_normal();
    out.rows.row(i) = (model.mean + root * z).transpose();
  }
  return out;
}

Sample sample_spherical(SphericalProfile profile, const SpdMatrix& scale,
                        Eigen::Index n, RngStream& rng) {
  if (n < 1) throw DomainError("sample_spherical: n must be positive");
  const Eigen::Index d = scale.dim();
  const Eigen::MatrixXd& root = scale.sqrt();
  Sample out;
  out.rows.resize(n, d);
  Eigen::VectorXd v(d);
  for (Eigen::Index i = 0; i < n; ++i) {
    switch (profile) {
      case SphericalProfile::kGaussian:
        for (Eigen::Index j = 0; j < d; ++j) v(j) = rng.next_normal();
        break;
      case SphericalProfile::kUniformBall: {
        unit_direction_into(v, rng);
        const double r = std::pow(rng.next_open(), 1.0 / static_cast<double>(d));
        v *= r;
        break;
      }
      case SphericalProfile::kLogisticRadial: {
        unit_direction_into(v, rng);
        const double p = rng.next_open();
        v *= std::fabs(std::log(p / (1.0 - p)));
        break;
      }
    }
    out.rows.row(i) = (root * v).transpose();
  }
  return out;
}

}  // namespace robust
