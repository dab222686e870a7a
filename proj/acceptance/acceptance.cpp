// Acceptance gate: thirteen numbered end-to-end checks, one per shipping
// requirement, run against the library exactly as a caller would use it.
// Each criterion prints a single [PASS]/[FAIL] line (failures list every
// violated bound with the measured value) and the process exits nonzero if
// any selected criterion fails. With no arguments all criteria run; passing
// numbers runs that subset, e.g. `acceptance 2 9`.

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "robust/baselines.hpp"
#include "robust/bench.hpp"
#include "robust/chebyshev.hpp"
#include "robust/contamination.hpp"
#include "robust/cov_estimator.hpp"
#include "robust/distributions.hpp"
#include "robust/errors.hpp"
#include "robust/mean_estimator.hpp"
#include "robust/normal.hpp"
#include "robust/orderstats.hpp"
#include "robust/rng.hpp"
#include "robust/sample.hpp"
#include "robust/smoothing.hpp"
#include "robust/spd.hpp"
#include "robust/sphere_net.hpp"
#include "robust/tuning.hpp"

namespace {

using robust::AdversaryKind;
using robust::AdversarySpec;
using robust::ChebyshevResult;
using robust::CovarianceConfig;
using robust::EstimatorReport;
using robust::FeasibleSetH;
using robust::GaussianModel;
using robust::PosteriorDraws;
using robust::PosteriorPool;
using robust::RngStream;
using robust::Sample;
using robust::SmoothMedConfig;
using robust::SpdMatrix;
using robust::SphereNet;
using robust::TailDist;
using robust::TailFitReport;
using robust::TruncatedPosteriorParams;

template <class... Ts>
std::string cat(const Ts&... parts) {
  std::ostringstream os;
  os.precision(10);
  (os << ... << parts);
  return os.str();
}

// Collects violated bounds; a criterion passes iff nothing was recorded.
struct Checker {
  std::vector<std::string> failures;
  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
};

Sample gaussian_sample(Eigen::Index n, const Eigen::VectorXd& mu,
                       const Eigen::MatrixXd& sigma, std::uint64_t seed) {
  RngStream rng(seed, 0);
  return robust::sample_gaussian(GaussianModel(mu, SpdMatrix(sigma)), n, rng);
}

Sample centered_sample(Eigen::Index n, const Eigen::MatrixXd& sigma,
                       std::uint64_t seed) {
  return gaussian_sample(n, Eigen::VectorXd::Zero(sigma.rows()), sigma, seed);
}

Eigen::VectorXd basis(Eigen::Index d, Eigen::Index i) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(d);
  v(i) = 1.0;
  return v;
}

double opnorm_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a - b);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

Eigen::Matrix2d rot2(double angle) {
  Eigen::Matrix2d q;
  q << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return q;
}

double pop_quantile(TailDist dist, double level) {
  switch (dist) {
    case TailDist::kGaussian:
      return robust::std_normal_quantile(level);
    case TailDist::kHalfNormal:
      return robust::half_normal_quantile(level);
    case TailDist::kChi2One:
      return robust::chi2_1_quantile(level);
  }
  return 0.0;
}

// One theta matrix (draws as rows) per net direction, sharing the offset
// pool: the frozen-draw layout cov_objective expects.
std::vector<Eigen::MatrixXd> draws_per_direction(const SphereNet& net,
                                                 const PosteriorPool& pool) {
  std::vector<Eigen::MatrixXd> out;
  out.reserve(static_cast<std::size_t>(net.size()));
  for (Eigen::Index k = 0; k < net.size(); ++k) {
    Eigen::MatrixXd thetas = pool.offsets.transpose();
    thetas.rowwise() += net.directions.row(k);
    out.push_back(std::move(thetas));
  }
  return out;
}

// ---------------------------------------------------------------------------
// 1. Median-of-square and half-normal quantile identities.

void crit_quantile_identities(Checker& c) {
  const double q75 = robust::std_normal_quantile(0.75);
  const double chi_med = robust::chi2_1_quantile(0.5);
  const double hn_med = robust::half_normal_quantile(0.5);
  c.expect(std::fabs(chi_med - q75 * q75) <= 1e-12,
           cat("chi2_1 median ", chi_med, " vs squared upper quartile ",
               q75 * q75, " differ by ", std::fabs(chi_med - q75 * q75)));
  c.expect(std::fabs(hn_med - q75) <= 1e-12,
           cat("half-normal median ", hn_med, " vs upper quartile ", q75,
               " differ by ", std::fabs(hn_med - q75)));
}

// ---------------------------------------------------------------------------
// 2. Gaussian sample-median concentration at N = 1001 over 20000 trials.

void crit_gaussian_median_lab(Checker& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const TailFitReport rep = robust::quantile_concentration_experiment(
      TailDist::kGaussian, 0.0, 1001, 20000, RngStream(202, 0));
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  c.expect(rep.n_times_var >= 1.44 && rep.n_times_var <= 1.70,
           cat("N*Var(median) = ", rep.n_times_var, " outside [1.44, 1.70]"));
  int bad = 0;
  double worst = 0.0;
  for (std::size_t i = 0; i < rep.t_grid.size(); ++i) {
    const double t = rep.t_grid[i];
    const double bound = 2.0 * std::exp(-1001.0 * t * t / 20.0);
    if (rep.empirical_survival[i] > bound) {
      ++bad;
      worst = std::max(worst, rep.empirical_survival[i] - bound);
    }
  }
  c.expect(bad == 0, cat("survival exceeds 2*exp(-N*t^2/20) at ", bad,
                         " grid points (worst excess ", worst, ")"));
  c.expect(rep.orlicz_scaled <= 3.0,
           cat("sqrt(N)-scaled subgaussian proxy = ", rep.orlicz_scaled,
               " > 3"));
  c.expect(secs <= 60.0, cat("runtime ", secs, " s exceeds 60 s"));
}

// ---------------------------------------------------------------------------
// 3. Chi-squared and half-normal medians concentrate at the same scale, and
//    shifted-quantile means stay within 4*eps + 3/sqrt(N) of the median.

void crit_transformed_median_lab(Checker& c) {
  const std::int64_t n = 1001;
  const std::int64_t trials = 20000;

  const TailFitReport chi = robust::quantile_concentration_experiment(
      TailDist::kChi2One, 0.0, n, trials, RngStream(301, 0));
  c.expect(chi.family == "subexponential",
           cat("chi2_1 tail family is '", chi.family, "'"));
  c.expect(chi.orlicz_scaled <= 10.0,
           cat("chi2_1 scaled subexponential proxy = ", chi.orlicz_scaled,
               " > 10"));

  const TailFitReport hn = robust::quantile_concentration_experiment(
      TailDist::kHalfNormal, 0.0, n, trials, RngStream(302, 0));
  c.expect(hn.family == "subgaussian",
           cat("half-normal tail family is '", hn.family, "'"));
  c.expect(hn.orlicz_scaled <= 3.0,
           cat("half-normal scaled subgaussian proxy = ", hn.orlicz_scaled,
               " > 3"));

  // Contaminated-rank robustness: the mean of the empirical (1/2+eps)
  // quantile must stay within 4*eps + 3/sqrt(N) of the population median.
  const TailDist dists[] = {TailDist::kGaussian, TailDist::kHalfNormal,
                            TailDist::kChi2One};
  const char* names[] = {"gaussian", "half_normal", "chi2_1"};
  const double eps_grid[] = {0.05, 0.1, 0.25};
  std::uint64_t stream = 0;
  for (int di = 0; di < 3; ++di) {
    for (double eps : eps_grid) {
      const TailFitReport r = robust::quantile_concentration_experiment(
          dists[di], eps, n, trials, RngStream(303, ++stream));
      const double mean_vs_median = r.mean_deviation +
                                    pop_quantile(dists[di], 0.5 + eps) -
                                    pop_quantile(dists[di], 0.5);
      const double bound = 4.0 * eps + 3.0 / std::sqrt(static_cast<double>(n));
      c.expect(std::fabs(mean_vs_median) <= bound,
               cat(names[di], " eps=", eps, ": |mean shifted quantile - "
                   "median| = ", std::fabs(mean_vs_median), " > ", bound));
    }
  }
}

// ---------------------------------------------------------------------------
// 4. Truncated posterior sampler: acceptance rate, mean recovery, support.

void crit_posterior_invariants(Checker& c) {
  const Sample s =
      centered_sample(2000, Eigen::MatrixXd::Identity(4, 4), 401);
  const SphereNet net = robust::default_cov_net(4);
  const SpdMatrix g = robust::construct_G(s, 0.0);
  const double tau = robust_trace(s, 0.0);
  const double omega = robust_opnorm(s, net);
  const TruncatedPosteriorParams p(4, g, omega, basis(4, 0), tau);

  // theta' Sigma theta <= 2*||Sigma|| + 20*radius^2 with Sigma = I.
  const double support_bound = 2.0 + 20.0 * p.radius * p.radius;

  int rate_ok = 0;
  double worst_sq = 0.0;
  for (int run = 0; run < 100; ++run) {
    const PosteriorDraws d = robust::sample_posterior(
        p, 1000, RngStream(402, 0).child(static_cast<std::uint64_t>(run)));
    if (d.acceptance_rate >= 0.45) ++rate_ok;
    worst_sq = std::max(worst_sq, d.thetas.rowwise().squaredNorm().maxCoeff());
  }
  c.expect(rate_ok >= 95,
           cat("acceptance rate >= 0.45 in only ", rate_ok, "/100 runs"));

  const PosteriorDraws big =
      robust::sample_posterior(p, 10000, RngStream(403, 0));
  const Eigen::VectorXd mean = big.thetas.colwise().mean();
  c.expect((mean - p.center).norm() <= 0.05,
           cat("||mean(theta) - v|| = ", (mean - p.center).norm(),
               " > 0.05 at m = 10000"));
  worst_sq = std::max(worst_sq, big.thetas.rowwise().squaredNorm().maxCoeff());
  c.expect(worst_sq <= support_bound,
           cat("draw support: max theta'theta = ", worst_sq, " exceeds ",
               support_bound));
}

// ---------------------------------------------------------------------------
// 5. Mean estimator on clean data: absolute accuracy and accuracy relative
//    to the sample mean.

void crit_mean_clean(Checker& c) {
  Eigen::VectorXd mu(2);
  mu << 0.5, -1.5;
  const SphereNet net = robust::default_mean_net(2);
  c.expect(net.size() == 360, cat("planar default net has ", net.size(),
                                  " directions, expected 360"));
  std::vector<double> errs, naive_errs;
  for (int t = 0; t < 50; ++t) {
    const Sample s = gaussian_sample(501, mu, Eigen::MatrixXd::Identity(2, 2),
                                     500 + static_cast<std::uint64_t>(t));
    SmoothMedConfig cfg;
    cfg.beta = robust::tune_beta_mean(s, 0.0, 0.05);
    cfg.mc_draws = 200;
    cfg.net = net;
    cfg.seed = RngStream(560 + static_cast<std::uint64_t>(t), 0);
    const EstimatorReport rep = robust::estimate_mean(s, 0.0, 0.05, cfg);
    errs.push_back((rep.estimate_vector - mu).norm());
    naive_errs.push_back(
        (s.rows.colwise().mean().transpose() - mu).norm());
  }
  const double med = robust::median(errs);
  const double naive_med = robust::median(naive_errs);
  c.expect(med <= 0.20, cat("median error ", med, " > 0.20 over 50 trials"));
  c.expect(med <= 3.0 * naive_med,
           cat("median error ", med, " more than 3x the sample mean's ",
               naive_med));
}

// ---------------------------------------------------------------------------
// 6. Mean estimator under a distant cluster: bounded error in every trial
//    while the sample mean is dragged away.

void crit_mean_breakdown(Checker& c) {
  for (int t = 0; t < 20; ++t) {
    const Sample clean = centered_sample(
        1001, Eigen::MatrixXd::Identity(2, 2),
        600 + static_cast<std::uint64_t>(t));
    AdversarySpec spec;
    spec.kind = AdversaryKind::kCluster;
    spec.epsilon = 0.1;
    spec.center = Eigen::Vector2d(1e6, 0.0);
    RngStream arng(660 + static_cast<std::uint64_t>(t), 0);
    const Sample dirty = robust::contaminate(clean, spec, arng);

    const double naive = dirty.rows.colwise().mean().norm();
    c.expect(naive >= 1e4,
             cat("trial ", t, ": sample mean error ", naive, " < 1e4"));

    SmoothMedConfig cfg;
    cfg.beta = robust::tune_beta_mean(dirty, 0.1, 0.05);
    cfg.mc_draws = 200;
    cfg.net = robust::default_mean_net(2);
    cfg.seed = RngStream(680 + static_cast<std::uint64_t>(t), 0);
    const EstimatorReport rep = robust::estimate_mean(dirty, 0.1, 0.05, cfg);
    c.expect(rep.estimate_vector.norm() <= 1.0,
             cat("trial ", t, ": estimate error ",
                 rep.estimate_vector.norm(), " > 1.0"));
  }
}

// ---------------------------------------------------------------------------
// 7. Mean estimator error envelope across contamination rates: bounded by
//    3*(0.08 + 5*eps) and strictly increasing in eps.

void crit_mean_envelope(Checker& c) {
  const double eps_grid[] = {0.05, 0.1, 0.2};
  std::vector<double> medians;
  for (int ei = 0; ei < 3; ++ei) {
    const double eps = eps_grid[ei];
    std::vector<double> errs;
    for (int t = 0; t < 30; ++t) {
      const std::uint64_t slot =
          static_cast<std::uint64_t>(100 * ei + t);
      const Sample clean = centered_sample(
          4001, Eigen::MatrixXd::Identity(2, 2), 700 + slot);
      AdversarySpec spec;
      spec.kind = AdversaryKind::kShift;
      spec.epsilon = eps;
      spec.direction = basis(2, 0);
      // Far enough that the contaminated directional medians sit at their
      // eps-quantile limit; the envelope then isolates the eps term.
      spec.magnitude = 50.0;
      RngStream arng(1700 + slot, 0);
      const Sample dirty = robust::contaminate(clean, spec, arng);

      SmoothMedConfig cfg;
      cfg.beta = robust::tune_beta_mean(dirty, eps, 0.05);
      cfg.mc_draws = 100;
      cfg.net = robust::default_mean_net(2);
      cfg.seed = RngStream(2700 + slot, 0);
      const EstimatorReport rep = robust::estimate_mean(dirty, eps, 0.05, cfg);
      errs.push_back(rep.estimate_vector.norm());
    }
    const double med = robust::median(errs);
    medians.push_back(med);
    c.expect(med <= 3.0 * (0.08 + 5.0 * eps),
             cat("eps=", eps, ": median error ", med, " > ",
                 3.0 * (0.08 + 5.0 * eps)));
  }
  c.expect(medians[0] < medians[1] && medians[1] < medians[2],
           cat("medians not strictly increasing: ", medians[0], ", ",
               medians[1], ", ", medians[2]));
}

// ---------------------------------------------------------------------------
// 8. Chebyshev-center solver against an exhaustive zooming grid search, plus
//    the one-dimensional closed form.

double grid_search_optimum(const SphereNet& net,
                           const std::vector<double>& values) {
  double vmax = 0.0;
  for (double m : values) vmax = std::max(vmax, std::fabs(m));
  Eigen::Vector2d center(0.0, 0.0);
  double radius = 2.0 * (vmax + 1.0);
  double best = std::numeric_limits<double>::infinity();
  const int side = 400;
  for (int level = 0; level < 4; ++level) {
    Eigen::Vector2d best_point = center;
    for (int ix = 0; ix <= side; ++ix) {
      for (int iy = 0; iy <= side; ++iy) {
        Eigen::VectorXd nu(2);
        nu << center(0) - radius + 2.0 * radius * ix / side,
            center(1) - radius + 2.0 * radius * iy / side;
        const double f = robust::directional_gap(net, values, nu);
        if (f < best) {
          best = f;
          best_point = nu;
        }
      }
    }
    center = best_point;
    radius = 4.0 * radius / side;
  }
  return best;
}

void crit_chebyshev_oracle(Checker& c) {
  constexpr double kPi = 3.14159265358979323846;
  const SphereNet net =
      robust::build_sphere_net(2, 2.0 * kPi / 7.5, RngStream(0, 0));
  c.expect(net.size() == 8,
           cat("planar test net has ", net.size(), " directions, expected 8"));
  RngStream rng(801, 0);
  int bad = 0;
  double worst = 0.0;
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> values(static_cast<std::size_t>(net.size()));
    double vmax = 0.0;
    for (double& m : values) {
      m = 2.0 * rng.next_normal();
      vmax = std::max(vmax, std::fabs(m));
    }
    const ChebyshevResult r = robust::chebyshev_center(net, values);
    const double oracle = grid_search_optimum(net, values);
    const double tol = 1e-6 * (1.0 + vmax);
    const double gap = std::fabs(r.objective - oracle);
    if (gap > 2.0 * tol) {
      ++bad;
      worst = std::max(worst, gap);
    }
  }
  c.expect(bad == 0, cat("solver vs grid oracle gap above 2*tol on ", bad,
                         "/200 instances (worst ", worst, ")"));

  const SphereNet signs = robust::build_sphere_net(1, 1.0, RngStream(0, 0));
  RngStream rng1(802, 0);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> values(static_cast<std::size_t>(signs.size()));
    double a = 0.0, b = 0.0;
    for (Eigen::Index k = 0; k < signs.size(); ++k) {
      values[static_cast<std::size_t>(k)] = 3.0 * rng1.next_normal();
      if (signs.directions(k, 0) > 0.0)
        a = values[static_cast<std::size_t>(k)];
      else
        b = values[static_cast<std::size_t>(k)];
    }
    const ChebyshevResult r = robust::chebyshev_center(signs, values);
    c.expect(r.center(0) == (a - b) / 2.0,
             cat("d=1 instance ", rep, ": center ", r.center(0),
                 " is not exactly (a-b)/2 = ", (a - b) / 2.0));
  }
}

// ---------------------------------------------------------------------------
// 9. Covariance estimator on clean data: accuracy, feasibility of the
//    published estimate, and near-optimality against the truth on the
//    frozen sample-average objective.

void crit_cov_clean(Checker& c) {
  const Eigen::Matrix2d sigma = Eigen::Vector2d(2.0, 1.0).asDiagonal();
  const SphereNet net = robust::default_cov_net(2);
  c.expect(net.size() == 180, cat("planar default net has ", net.size(),
                                  " directions, expected 180"));
  std::vector<double> errs;
  int truth_feasible = 0;
  for (int t = 0; t < 20; ++t) {
    const Sample s =
        centered_sample(2000, sigma, 900 + static_cast<std::uint64_t>(t));
    CovarianceConfig cfg;
    cfg.seed = RngStream(960 + static_cast<std::uint64_t>(t), 0);
    auto [est, rep] = robust::estimate_covariance(s, 0.0, 0.1, cfg);
    errs.push_back(opnorm_diff(est.mat(), sigma));

    // Rebuild the tuned stages from the published seed and verify the
    // estimate is feasible and certifiably near-optimal.
    const SpdMatrix g = robust::construct_G(s, 0.0);
    const double tau = robust_trace(s, 0.0);
    const double omega = robust_opnorm(s, net);
    const int beta = static_cast<int>(
        std::max<long long>(1, std::llround(tau / omega)));
    const TruncatedPosteriorParams params(beta, g, omega, basis(2, 0), tau);
    const SpdMatrix h = robust::estimate_H(
        params, 20000, cfg.seed.child(robust::kCovPosteriorCovStage));
    const double alpha = robust::estimate_alpha(s, h);
    c.expect(rep.omega.has_value() && *rep.omega == omega,
             cat("trial ", t, ": reported omega does not replay"));
    c.expect(rep.alpha.has_value() && *rep.alpha == alpha,
             cat("trial ", t, ": reported alpha does not replay"));

    const FeasibleSetH set(h, alpha, omega, g, 0.0, 0.1, s.size());
    c.expect(set.contains(est.mat(), 1e-6),
             cat("trial ", t, ": estimate is outside the feasible set"));

    const PosteriorPool pool = robust::whitened_posterior_pool(
        s.rows, params, 100, cfg.seed.child(robust::kCovPoolStage));
    const std::vector<Eigen::MatrixXd> draws = draws_per_direction(net, pool);
    const double f_est = robust::cov_objective(est.mat(), s, net, draws);
    c.expect(std::fabs(f_est - rep.objective) <=
                 1e-9 * (1.0 + std::fabs(rep.objective)),
             cat("trial ", t, ": replayed objective ", f_est,
                 " != reported ", rep.objective));
    if (set.contains(sigma, 1e-6)) {
      ++truth_feasible;
      const double f_truth = robust::cov_objective(sigma, s, net, draws);
      c.expect(f_est <= f_truth + 1e-3,
               cat("trial ", t, ": objective(estimate) = ", f_est,
                   " exceeds objective(truth) + 1e-3 = ", f_truth + 1e-3));
    }
  }
  const double med = robust::median(errs);
  c.expect(med <= 0.5, cat("median opnorm error ", med, " > 0.5"));
  // The near-optimality clause is conditional; make sure it ever fired.
  c.expect(truth_feasible >= 1,
           "the true covariance was never inside the feasible set, so the "
           "near-optimality clause was never exercised");
}

// ---------------------------------------------------------------------------
// 10. Covariance estimator under a distant cluster: bounded error while the
//     raw sample covariance explodes.

void crit_cov_breakdown(Checker& c) {
  const Eigen::Matrix2d sigma = Eigen::MatrixXd::Identity(2, 2);
  std::vector<double> errs, naive_errs;
  for (int t = 0; t < 5; ++t) {
    const Sample clean =
        centered_sample(2000, sigma, 1000 + static_cast<std::uint64_t>(t));
    AdversarySpec spec;
    spec.kind = AdversaryKind::kCluster;
    spec.epsilon = 0.1;
    spec.center = Eigen::Vector2d(1e3, 0.0);
    RngStream arng(1060 + static_cast<std::uint64_t>(t), 0);
    const Sample dirty = robust::contaminate(clean, spec, arng);

    naive_errs.push_back(opnorm_diff(robust::sample_cov(dirty).mat(), sigma));
    CovarianceConfig cfg;
    cfg.seed = RngStream(1080 + static_cast<std::uint64_t>(t), 0);
    auto [est, rep] = robust::estimate_covariance(dirty, 0.1, 0.1, cfg);
    errs.push_back(opnorm_diff(est.mat(), sigma));
  }
  const double med = robust::median(errs);
  const double naive_med = robust::median(naive_errs);
  c.expect(med <= 1.0, cat("median opnorm error ", med, " > 1.0"));
  c.expect(naive_med >= 100.0,
           cat("median sample covariance error ", naive_med, " < 100"));
}

// ---------------------------------------------------------------------------
// 11. Tuning pipeline contract on clean identity data in three dimensions.

void crit_tuning_pipeline(Checker& c) {
  const Eigen::MatrixXd sigma = Eigen::MatrixXd::Identity(3, 3);
  const SphereNet net = robust::default_cov_net(3);
  int loewner_ok = 0, tau_ok = 0, omega_ok = 0, beta_range_ok = 0,
      beta_window_ok = 0, alpha_ok = 0;
  const double rank = 3.0;  // effective rank of the identity
  for (int t = 0; t < 100; ++t) {
    const Sample s =
        centered_sample(3000, sigma, 1100 + static_cast<std::uint64_t>(t));
    const SpdMatrix g = robust::construct_G(s, 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(10.0 * g.mat() - sigma);
    if (es.eigenvalues().minCoeff() >= -1e-12) ++loewner_ok;

    const double tau = robust_trace(s, 0.0);
    if (tau >= 1.5 && tau <= 6.0) ++tau_ok;
    const double omega = robust_opnorm(s, net);
    if (omega >= 0.5 && omega <= 2.0) ++omega_ok;

    const int beta = static_cast<int>(
        std::max<long long>(1, std::llround(tau / omega)));
    if (beta >= 1 && beta <= 30) ++beta_range_ok;
    if (beta >= rank / 10.0 && beta <= 10.0 * rank) ++beta_window_ok;

    const TruncatedPosteriorParams params(beta, g, omega, basis(3, 0), tau);
    const SpdMatrix h = robust::estimate_H(
        params, 20000, RngStream(1160 + static_cast<std::uint64_t>(t), 0));
    const double alpha = robust::estimate_alpha(s, h);
    const double target = h.mat().trace();  // tr(Sigma * H) with Sigma = I
    if (std::fabs(alpha - target) <= 0.2 * target) ++alpha_ok;
  }
  c.expect(loewner_ok >= 95,
           cat("Sigma <= 10*G in only ", loewner_ok, "/100 trials"));
  c.expect(tau_ok == 100,
           cat("trace proxy in [1.5, 6.0] in only ", tau_ok, "/100 trials"));
  c.expect(omega_ok == 100, cat("operator-norm proxy in [0.5, 2.0] in only ",
                                omega_ok, "/100 trials"));
  c.expect(beta_range_ok == 100,
           cat("beta in [1, 30] in only ", beta_range_ok, "/100 trials"));
  c.expect(beta_window_ok >= 95,
           cat("beta within a factor 10 of the effective rank in only ",
               beta_window_ok, "/100 trials"));
  c.expect(alpha_ok >= 90,
           cat("alpha within 20% of tr(Sigma*H) in only ", alpha_ok,
               "/100 trials"));
}

// ---------------------------------------------------------------------------
// 12. Equivariance: translating, rotating, or scaling the data moves the
//     estimates covariantly, with the same seeds on both sides.

void crit_equivariance(Checker& c) {
  constexpr double kPi = 3.14159265358979323846;

  // Mean estimator, translation.
  {
    const Sample s =
        centered_sample(60, Eigen::MatrixXd::Identity(2, 2), 1201);
    Sample shifted = s;
    const Eigen::RowVector2d b(12.5, -3.75);
    shifted.rows.rowwise() += b;
    SmoothMedConfig cfg;
    cfg.beta = 3;
    cfg.mc_draws = 50;
    cfg.net = robust::build_sphere_net(2, kPi / 45.0, RngStream(0, 0));
    cfg.seed = RngStream(1202, 0);
    const EstimatorReport base = robust::estimate_mean(s, 0.0, 0.05, cfg);
    const EstimatorReport moved =
        robust::estimate_mean(shifted, 0.0, 0.05, cfg);
    const double dev =
        (moved.estimate_vector - base.estimate_vector - b.transpose()).norm();
    c.expect(dev <= 1e-9 * (1.0 + b.norm()),
             cat("mean translation deviates by ", dev));
  }

  // Mean estimator, rotation with a co-rotated net.
  {
    Eigen::VectorXd mu(2);
    mu << 2.0, -1.0;
    const Sample s =
        gaussian_sample(80, mu, Eigen::MatrixXd::Identity(2, 2), 1203);
    const Eigen::Matrix2d q = rot2(0.9);
    SmoothMedConfig cfg;
    cfg.beta = 3;
    cfg.mc_draws = 50;
    cfg.net = robust::build_sphere_net(2, kPi / 45.0, RngStream(0, 0));
    cfg.seed = RngStream(1204, 0);
    Sample rotated;
    rotated.rows = s.rows * q.transpose();
    SmoothMedConfig rcfg = cfg;
    rcfg.net.directions = cfg.net.directions * q.transpose();
    const EstimatorReport base = robust::estimate_mean(s, 0.0, 0.05, cfg);
    const EstimatorReport rot =
        robust::estimate_mean(rotated, 0.0, 0.05, rcfg);
    const double dev = (rot.estimate_vector - q * base.estimate_vector).norm();
    c.expect(dev <= 1e-9 * (1.0 + base.estimate_vector.norm()),
             cat("mean rotation deviates by ", dev));
  }

  // Covariance pipeline, shared base run for the scaling and rotation legs.
  const Eigen::Matrix2d sigma = Eigen::Vector2d(2.0, 1.0).asDiagonal();
  const Sample base = centered_sample(1200, sigma, 1205);
  const SphereNet net = robust::default_cov_net(2);
  const SpdMatrix g = robust::construct_G(base, 0.0);
  const double tau = robust_trace(base, 0.0);
  const double omega = robust_opnorm(base, net);
  const TruncatedPosteriorParams params(2, g, omega, basis(2, 0), tau);
  const SpdMatrix h =
      robust::estimate_H(params, 20000, RngStream(1206, 0));
  const double alpha = robust::estimate_alpha(base, h);

  CovarianceConfig cfg;
  cfg.beta = 2;
  cfg.omega = omega;
  cfg.shape_G = g;
  cfg.alpha = alpha;
  cfg.posterior_H = h;
  cfg.seed = RngStream(1207, 0);
  auto [est_base, rep_base] = robust::estimate_covariance(base, 0.0, 0.1, cfg);

  // Scaling a^2-homogeneity: double the data, scale the tuned parameters the
  // way the tuners would. The posterior offsets are unit-scale, so H is
  // unchanged.
  {
    Sample scaled = base;
    scaled.rows *= 2.0;
    CovarianceConfig cfg_s = cfg;
    cfg_s.omega = 4.0 * omega;
    cfg_s.shape_G = SpdMatrix(4.0 * g.mat());
    cfg_s.alpha = 4.0 * alpha;
    auto [est_scaled, rep_scaled] =
        robust::estimate_covariance(scaled, 0.0, 0.1, cfg_s);
    const double dev = (est_scaled.mat() - 4.0 * est_base.mat()).norm();
    c.expect(dev <= 1e-9 * (1.0 + 4.0 * est_base.mat().norm()),
             cat("covariance scaling deviates by ", dev));
  }

  // Rotation. The tuners and every value-level stage co-rotate to float
  // precision; the optimizer path does not (a nonconvex sample-average
  // landscape amplifies last-bit differences into a spread of near-tied
  // minimizers), so the full pipeline is held to the statistical scale of
  // that spread while the sharp checks live on the deterministic stages.
  {
    const Eigen::Matrix2d q = rot2(0.7);
    Sample rotated = base;
    rotated.rows = base.rows * q.transpose();
    SphereNet net_q = net;
    net_q.directions = net.directions * q.transpose();
    const Eigen::Matrix2d g_rot = q * g.mat() * q.transpose();

    c.expect((robust::construct_G(rotated, 0.0).mat() - g_rot).norm() <=
                 1e-12 * (1.0 + g.mat().norm()),
             "second-moment proxy does not co-rotate at 1e-12");
    c.expect(std::fabs(robust_trace(rotated, 0.0) - tau) <= 1e-12 * tau,
             "trace proxy is not rotation invariant at 1e-12");
    c.expect(std::fabs(robust_opnorm(rotated, net_q) - omega) <=
                 1e-12 * omega,
             "operator-norm proxy does not co-rotate at 1e-12");

    const TruncatedPosteriorParams params_rot(2, SpdMatrix(g_rot), omega,
                                              q * basis(2, 0), tau);
    const PosteriorPool pool_base = robust::whitened_posterior_pool(
        base.rows, params, 100, cfg.seed.child(robust::kCovPoolStage));
    const PosteriorPool pool_rot = robust::whitened_posterior_pool(
        rotated.rows, params_rot, 100, cfg.seed.child(robust::kCovPoolStage));
    const double f_base = robust::cov_objective(
        est_base.mat(), base, net, draws_per_direction(net, pool_base));
    const double f_rot = robust::cov_objective(
        q * est_base.mat() * q.transpose(), rotated, net_q,
        draws_per_direction(net_q, pool_rot));
    c.expect(std::fabs(f_rot - f_base) <= 1e-9 * (1.0 + std::fabs(f_base)),
             cat("objective value moves by ", std::fabs(f_rot - f_base),
                 " under rotation"));

    const FeasibleSetH set_base(h, alpha, omega, g, 0.0, 0.1, base.size());
    const FeasibleSetH set_rot(SpdMatrix(q * h.mat() * q.transpose()), alpha,
                               omega, SpdMatrix(g_rot), 0.0, 0.1,
                               base.size());
    const Eigen::Matrix2d target = 5.0 * est_base.mat();
    const Eigen::Matrix2d proj =
        robust::project_feasible(target, set_base).mat();
    const Eigen::Matrix2d proj_rot =
        robust::project_feasible(q * target * q.transpose(), set_rot).mat();
    c.expect((proj_rot - q * proj * q.transpose()).norm() <=
                 1e-9 * (1.0 + proj.norm()),
             "feasible projection does not commute with rotation at 1e-9");

    CovarianceConfig cfg_r = cfg;
    cfg_r.shape_G = SpdMatrix(g_rot);
    cfg_r.posterior_H = SpdMatrix(q * h.mat() * q.transpose());
    cfg_r.net = net_q;
    auto [est_rot, rep_rot] =
        robust::estimate_covariance(rotated, 0.0, 0.1, cfg_r);
    c.expect(std::fabs(rep_rot.objective - rep_base.objective) <= 1e-4,
             cat("rotated solve lands in a different basin: objective gap ",
                 std::fabs(rep_rot.objective - rep_base.objective)));
    const double dev =
        (est_rot.mat() - q * est_base.mat() * q.transpose()).norm();
    c.expect(dev <= 1e-2,
             cat("rotated estimate deviates by ", dev,
                 ", beyond the minimizer spread"));
  }
}

// ---------------------------------------------------------------------------
// 13. Sweep determinism: the same config text yields byte-identical CSV
//     across reruns and thread counts.

void crit_sweep_determinism(Checker& c) {
  const std::string config_text =
      "scenario sweep\n"
      "N 200 400\n"
      "eps 0 0.1\n"
      "trials 3\n"
      "seed 20260816\n"
      "estimator sample_mean smoothmed trimmed_mean sample_cov trimmed_cov\n"
      "adversary cluster\n"
      "adversary_center 8 0\n";
  const robust::ExperimentConfig cfg = robust::parse_config_text(config_text);
  const std::string csv_a = robust::csv_string(robust::run_experiment(cfg, 1));
  const std::string csv_b = robust::csv_string(robust::run_experiment(cfg, 1));
  const std::string csv_c = robust::csv_string(robust::run_experiment(cfg, 4));
  const robust::ExperimentConfig cfg2 = robust::parse_config_text(config_text);
  const std::string csv_d =
      robust::csv_string(robust::run_experiment(cfg2, 2));

  c.expect(!csv_a.empty() && csv_a.find('\n') != csv_a.size() - 1,
           "sweep produced no data rows");
  c.expect(csv_a == csv_b, "rerun with the same seed changed the CSV bytes");
  c.expect(csv_a == csv_c, "running with 4 threads changed the CSV bytes");
  c.expect(csv_a == csv_d,
           "re-parsing the config or running with 2 threads changed the CSV "
           "bytes");
}

// ---------------------------------------------------------------------------

struct Criterion {
  int id;
  const char* label;
  void (*run)(Checker&);
};

const Criterion kCriteria[] = {
    {1, "distribution quantile identities", crit_quantile_identities},
    {2, "gaussian median concentration lab", crit_gaussian_median_lab},
    {3, "transformed median concentration lab", crit_transformed_median_lab},
    {4, "truncated posterior sampler invariants", crit_posterior_invariants},
    {5, "mean estimator on clean data", crit_mean_clean},
    {6, "mean estimator breakdown resistance", crit_mean_breakdown},
    {7, "mean estimator contamination envelope", crit_mean_envelope},
    {8, "center solver against a grid oracle", crit_chebyshev_oracle},
    {9, "covariance estimator on clean data", crit_cov_clean},
    {10, "covariance estimator breakdown resistance", crit_cov_breakdown},
    {11, "tuning pipeline statistical contract", crit_tuning_pipeline},
    {12, "equivariance suite", crit_equivariance},
    {13, "sweep determinism across threads", crit_sweep_determinism},
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    std::size_t pos = 0;
    int id = 0;
    try {
      id = std::stoi(arg, &pos);
    } catch (...) {
      pos = 0;
    }
    if (pos != arg.size() || id < 1 ||
        id > static_cast<int>(std::size(kCriteria))) {
      std::cerr << "usage: acceptance [criterion-number ...]  (1.."
                << std::size(kCriteria) << ")\n";
      return 2;
    }
    selected.push_back(id);
  }
  if (selected.empty())
    for (const Criterion& cr : kCriteria) selected.push_back(cr.id);

  int failed = 0;
  for (int id : selected) {
    const Criterion& cr = kCriteria[id - 1];
    Checker c;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      cr.run(c);
    } catch (const std::exception& e) {
      c.failures.push_back(cat("unhandled exception: ", e.what()));
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    std::ostringstream line;
    line << (c.failures.empty() ? "[PASS]" : "[FAIL]") << " criterion "
         << std::setw(2) << cr.id << ": " << cr.label << " (" << std::fixed
         << std::setprecision(1) << secs << " s)\n";
    for (const std::string& f : c.failures) line << "       - " << f << "\n";
    std::cout << line.str() << std::flush;
    if (!c.failures.empty()) ++failed;
  }
  if (failed) {
    std::cout << failed << " of " << selected.size() << " criteria FAILED\n";
    return 1;
  }
  std::cout << "all " << selected.size() << " criteria passed\n";
  return 0;
}
