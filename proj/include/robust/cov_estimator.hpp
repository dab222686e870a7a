#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "robust/report.hpp"
#include "robust/rng.hpp"
#include "robust/sample.hpp"
#include "robust/spd.hpp"
#include "robust/sphere_net.hpp"

namespace robust {

// Stage indices for deriving substage streams from the covariance config
// seed, published so tests can replay each stage's draws exactly.
inline constexpr std::uint64_t kCovPoolStage = 1;
inline constexpr std::uint64_t kCovPosteriorCovStage = 2;
inline constexpr std::uint64_t kCovRestartStage = 3;

// Truncated Gaussian posterior around a unit direction v: the law of
// theta = v + z/sqrt(beta), z standard normal, conditioned on the ellipsoid
// ||G^{1/2}(theta - v)|| <= radius with radius = 100*sqrt(omega).
// Construction checks the admissibility condition radius^2 >= 20*tau/beta
// (tau is the data's trace proxy), which keeps the conditioning event likely
// and every sampler below cheap.
struct TruncatedPosteriorParams {
  int beta = 1;
  SpdMatrix G;
  double omega = 0.0;
  Eigen::VectorXd center;
  double radius = 0.0;

  TruncatedPosteriorParams(int beta_in, SpdMatrix g, double omega_in,
                           Eigen::VectorXd center_in, double tau);
  Eigen::Index dim() const { return center.size(); }
};

// Accepted posterior draws, one per row, plus the acceptance rate observed
// at the point the sampler stopped.
struct PosteriorDraws {
  Eigen::MatrixXd thetas;
  double acceptance_rate = 1.0;
};

// Rejection sampler for the truncated posterior: proposes theta = v +
// z/sqrt(beta) and keeps draws inside the truncation ellipsoid until m are
// accepted. Gives up once 20*m proposals have been consumed, signalling an
// inadmissible parameter set. Each proposal consumes exactly dim() normals,
// so the output is a pure function of (params, m, rng).
PosteriorDraws sample_posterior(const TruncatedPosteriorParams& params, int m,
                                RngStream rng);

// Monte Carlo estimate of H = E (theta - v)(theta - v)^T under the truncated
// posterior, symmetrized. H does not depend on v and its spectrum lies in
// (0, 2/beta] up to MC error of about 5/(beta*sqrt(m)).
SpdMatrix estimate_H(const TruncatedPosteriorParams& params, int m,
                     RngStream rng);

// Offset pool for the covariance objective: columns u_j such that
// theta_{v,j} = v + u_j for every direction v at once. Offsets are whitened
// direction draws scaled by 1/sqrt(beta) (unit covariance like the ambient
// sampler's proposals, but built from the sample's own rows, see
// whitened_direction_draws) and filtered by the truncation indicator
// u^T G u <= radius^2, which does not involve v, so one pool serves the
// whole direction net, co-rotates with the sample, and is invariant under
// data scaling with co-scaled parameters. params.center is not consulted.
// Error behavior matches sample_posterior (20*m proposal cap).
struct PosteriorPool {
  Eigen::MatrixXd offsets;  // d x m, columns u_j
  double acceptance_rate = 1.0;
};

PosteriorPool whitened_posterior_pool(const Eigen::MatrixXd& rows,
                                      const TruncatedPosteriorParams& params,
                                      int m, RngStream rng);

// Constraint set for the covariance search. Membership:
//   Gamma PSD,  Gamma <= 10*G (Loewner),  ||Gamma|| <= 10*omega,
//   |tr(Gamma H) - alpha| <= slack * tr(Gamma H),
// with slack = c_const * (sqrt((r(G) + log(1/delta)) / N) + eps) and r(G)
// the effective rank of G. Construction verifies the set contains a scaled
// identity t*I; a configuration admitting no such witness is rejected with
// the violated constraint named, even if some non-identity member existed.
class FeasibleSetH {
 public:
  FeasibleSetH(SpdMatrix h, double alpha, double omega, SpdMatrix g,
               double eps, double delta, Eigen::Index sample_size,
               double c_const = 3.0);

  const SpdMatrix& h() const { return h_; }
  const SpdMatrix& g() const { return g_; }
  double alpha() const { return alpha_; }
  double omega() const { return omega_; }
  double slack() const { return slack_; }
  double c_const() const { return c_const_; }
  Eigen::Index dim() const { return h_.dim(); }

  // Trace-slab bounds in t = tr(Gamma H); upper may be +infinity.
  double slab_lower() const { return slab_lower_; }
  double slab_upper() const { return slab_upper_; }

  // Relative violation of each constraint at gamma; all zero inside the set.
  struct Residuals {
    double psd = 0.0;
    double loewner = 0.0;
    double opnorm = 0.0;
    double trace = 0.0;
    double max_violation() const;
  };
  Residuals residuals(const Eigen::MatrixXd& gamma) const;
  bool contains(const Eigen::MatrixXd& gamma, double rel_tol = 1e-6) const;

 private:
  SpdMatrix h_;
  SpdMatrix g_;
  double alpha_ = 0.0;
  double omega_ = 0.0;
  double slack_ = 0.0;
  double c_const_ = 3.0;
  double slab_lower_ = 0.0;
  double slab_upper_ = 0.0;
  Eigen::MatrixXd cap_;  // 10*G
};

// Dykstra alternating projection onto the intersection of the four
// constraint sets, swept in the order trace slab, Loewner cap, operator
// norm, PSD until the per-sweep movement drops below 1e-8 relative or
// max_sweeps is exhausted. The output must satisfy every constraint within
// 1e-6 relative; otherwise a projection-failed error reports the residuals.
SpdMatrix project_feasible(const Eigen::MatrixXd& gamma_raw,
                           const FeasibleSetH& set, int max_sweeps = 500);

// Sample-average min-max objective:
//   max over net directions v of
//     mean over draws theta of | Med_i |<x_i, theta>| - q75 * sqrt(theta' Gamma theta) |
// with q75 the standard normal upper quartile. theta_draws holds one matrix
// per net direction (draws as rows) and stays frozen across an optimization,
// so objective values of different Gamma are comparable.
double cov_objective(const Eigen::MatrixXd& gamma, const Sample& sample,
                     const SphereNet& net,
                     const std::vector<Eigen::MatrixXd>& theta_draws);

// Knobs of the covariance estimator. Zero / empty members are tuned from
// the sample; explicitly set members are used as given (their scales must be
// mutually consistent, e.g. scaling data by a needs omega, G, alpha scaled
// by a^2). seed makes every stage deterministic.
struct CovarianceConfig {
  int beta = 0;                          // >= 1 overrides, 0 tunes
  double omega = 0.0;                    // > 0 overrides, 0 tunes
  std::optional<SpdMatrix> shape_G;      // truncation shape G
  std::optional<double> alpha;           // trace target
  std::optional<SpdMatrix> posterior_H;  // posterior covariance H
  double c_const = 3.0;
  SphereNet net;                         // empty: default_cov_net(d)
  int mc_draws = 100;                    // objective pool size
  int h_draws = 20000;                   // MC budget for H when tuned
  int restarts = 5;
  int subgradient_steps = 120;
  int polish_steps = 400;  // cap; the polish usually exits at its step floor
  RngStream seed{0, 0};
};

// Estimation net used when no override is given: signs for d = 1, the
// 2-degree equiangular grid (180 directions) for d = 2, and a symmetrized
// random net of about 400 directions from a fixed internal seed for d >= 3.
SphereNet default_cov_net(Eigen::Index d);

// Covariance estimator for the zero-mean contaminated model: minimizes
// cov_objective over the feasible set by projected subgradient descent
// (step eta_0/sqrt(k), eta_0 = ||Gamma_0||/10) from the projected trimmed
// second moment, across cfg.restarts perturbed starts, followed by a
// monotone line-search polish. Requires eps < 0.25 and N >= 20. The report
// carries the best objective, its trace, the restart table, the pool
// acceptance rate, and the tuned beta/omega/alpha.
std::pair<SpdMatrix, EstimatorReport> estimate_covariance(
    const Sample& contaminated, double eps, double delta,
    const CovarianceConfig& cfg = {});

}  // namespace robust
