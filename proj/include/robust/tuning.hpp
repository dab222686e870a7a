#pragma once

#include <string>

#include "robust/sample.hpp"
#include "robust/sphere_net.hpp"
#include "robust/spd.hpp"

namespace robust {

// Data-driven parameters for the covariance estimator, all computed from the
// same (contaminated) sample. alpha is defined relative to a posterior
// matrix H, so it is filled in by the caller once H exists.
struct TunedParams {
  SpdMatrix G{Eigen::MatrixXd::Identity(1, 1)};
  double tau = 0.0;
  double omega = 0.0;
  int beta = 1;
  double alpha = 0.0;

  std::string to_json() const;
  static TunedParams from_json(const std::string& text);
};

// Second-moment proxy: drop the ceil(eps*N) rows of largest Euclidean norm
// (ties broken by index), then (1/N) * sum of x x^T over the survivors. The
// divisor stays N, biasing G slightly downward, which is the safe side for
// its role as an upper-bound proxy target.
SpdMatrix construct_G(const Sample& sample, double eps);

// Trace proxy: symmetrically trimmed mean of the squared row norms with trim
// fraction max(2*eps, 0.02) per side.
double robust_trace(const Sample& sample, double eps);

// Operator-norm proxy: max over net directions of the squared MAD of the
// projections, rescaled so a clean Gaussian direction returns its variance.
double robust_opnorm(const Sample& sample, const SphereNet& net);

// Trace-against-H proxy: sum over coordinates of the median of squared
// coordinates of H^{1/2} x, rescaled by the squared upper-quartile constant.
// Targets tr(Sigma H).
double estimate_alpha(const Sample& sample, const SpdMatrix& h);

}  // namespace robust
