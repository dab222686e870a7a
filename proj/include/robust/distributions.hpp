#pragma once

#include <Eigen/Dense>

#include "robust/rng.hpp"
#include "robust/sample.hpp"
#include "robust/spd.hpp"

namespace robust {

// n i.i.d. draws from the model. Deterministic given the stream: row i is
// built from draws i*d .. i*d+d-1, so a sample is bit-identical across runs
// and the first rows do not depend on n. Zero covariance returns every row
// exactly equal to the mean.
Sample sample_gaussian(const GaussianModel& model, Eigen::Index n, RngStream& rng);

// Spherically symmetric generators used for smoke tests: rows are
// scale.sqrt() * (r * u) with u uniform on the unit sphere and r drawn from
// the profile's radial law.
enum class SphericalProfile {
  kGaussian,       // coincides in law with sample_gaussian at mean zero
  kUniformBall,    // r = U^(1/d): uniform on the unit ball
  kLogisticRadial  // r = |logistic quantile|: heavier, still light-tailed
};

Sample sample_spherical(SphericalProfile profile, const SpdMatrix& scale,
                        Eigen::Index n, RngStream& rng);

// Uniform draw from the unit sphere S^{d-1}: d normal draws, normalized.
// Always consumes exactly d draws; the measure-zero all-zeros case falls
// back to the first basis vector.
Eigen::VectorXd unit_direction(Eigen::Index d, RngStream& rng);

}  // namespace robust
