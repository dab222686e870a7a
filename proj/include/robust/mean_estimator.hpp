#pragma once

#include <optional>

#include "robust/report.hpp"
#include "robust/rng.hpp"
#include "robust/sample.hpp"
#include "robust/sphere_net.hpp"

namespace robust {

// Knobs of the smoothed-median mean estimator. beta is the inverse variance
// of the gram-proportional smoothing noise; mc_draws is the Monte Carlo
// budget (rounded up to even, see SmoothingDraws); net holds the evaluation
// directions; seed makes every number deterministic.
struct SmoothMedConfig {
  int beta = 1;
  int mc_draws = 200;
  SphereNet net;
  RngStream seed{0, 0};
};

// The estimation net used when no override is given: signs for d = 1, the
// 1-degree equiangular grid for d = 2, and for d >= 3 a symmetrized random
// net of about 2000 directions from a fixed internal seed. Net size is an
// accuracy knob, not a statistical guarantee.
SphereNet default_mean_net(Eigen::Index d);

// Smoothed directional median: mean over draws of the median of the
// projections onto v, each draw perturbed by gram-proportional noise
// xi_i = <x_i, g>/sqrt(beta). Deterministic given cfg.seed; evaluating at a
// net direction reproduces the corresponding per_direction entry of
// estimate_mean run with the same config. cfg.net is not used here. v must
// be unit length.
double smooth_med(const Sample& sample, const Eigen::VectorXd& v,
                  const SmoothMedConfig& cfg);

// Data-driven smoothing parameter: the ratio of a coordinatewise MAD-based
// trace proxy to a directional MAD-based operator-norm proxy, rounded and
// clamped to >= 1. Targets the effective rank of the covariance within a
// factor of 10. Requires N >= 20; a sample whose every coordinate has zero
// MAD (e.g. identical rows) is rejected as rank-degenerate. eps and delta
// are validated and reserved for the tuning contract; the current rule does
// not branch on them.
int tune_beta_mean(const Sample& sample, double eps, double delta);

// Smoothed-median mean estimator: computes the smoothed directional median
// m_v for every net direction, then returns the Chebyshev center, the vector
// nu minimizing max_v |m_v - <nu, v>|. Requires eps < 0.25. When overrides
// is empty, beta is tuned from the sample and the default net, draw count
// 200, and seed stream (0, 0) are used. The report carries the estimate,
// the min-max objective, per-direction medians, beta, draw count, and seed.
EstimatorReport estimate_mean(
    const Sample& contaminated, double eps, double delta,
    const std::optional<SmoothMedConfig>& overrides = std::nullopt);

}  // namespace robust
