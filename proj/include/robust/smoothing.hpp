#pragma once

#include <Eigen/Dense>
#include <vector>

#include "robust/rng.hpp"

namespace robust {

// Whitened direction draws: a d x M matrix whose columns are marginally
// standard normal in R^d, built as g_j = C^{+1/2-inverse} Xc^T w_j with
// w_j standard normal in R^N, Xc the mean-centered data rows and C = Xc^T Xc.
// Columns come in antithetic pairs (g, -g), so M is draws rounded up to even
// and the column sum is exactly zero.
//
// Why this construction instead of ambient N(0, I_d) draws: it depends on
// the data only through the centered gram, so translating the sample leaves
// every draw bitwise unchanged and rotating the sample rotates every draw
// with it. Those two facts give the directional-median estimators exact
// translation covariance and tight rotation covariance for a fixed seed.
// When the centered rows span R^d (any non-degenerate sample with N > d)
// the law is exactly standard normal; affine-degenerate samples receive the
// projection of that law onto the centered span.
Eigen::MatrixXd whitened_direction_draws(const Eigen::MatrixXd& rows,
                                         int draws, RngStream rng);

// Monte Carlo offsets for the smoothed directional median. Each column j is
// xi_j = X g_j / sqrt(beta) with g_j a whitened direction draw, so each
// offset vector has Cov(xi) = (X X^T) / beta, the gram-proportional
// smoothing law, and offsets inherit the equivariance of the draws.
class SmoothingDraws {
 public:
  static SmoothingDraws build(const Eigen::MatrixXd& rows, double beta,
                              int draws, RngStream rng);

  // N x M matrix of offsets; M is the effective (even) draw count.
  const Eigen::MatrixXd& offsets() const { return offsets_; }
  int draws() const { return static_cast<int>(offsets_.cols()); }

 private:
  Eigen::MatrixXd offsets_;
};

// Mean over draws of the median of (<x_i, v> + xi_i), evaluated with shared
// offsets. `scratch` must have size N; it is overwritten.
double smoothed_median_eval(const Eigen::MatrixXd& rows,
                            const SmoothingDraws& draws,
                            const Eigen::VectorXd& v,
                            std::vector<double>& scratch);

}  // namespace robust
