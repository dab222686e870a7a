#include "robust/cov_estimator.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "robust/baselines.hpp"
#include "robust/errors.hpp"
#include "robust/normal.hpp"
#include "robust/orderstats.hpp"
#include "robust/parallel.hpp"
#include "robust/smoothing.hpp"
#include "robust/tuning.hpp"

namespace robust {

namespace {

constexpr std::uint64_t kCovNetSeed = 0xC07A57A7;
constexpr double kInf = std::numeric_limits<double>::infinity();

double resolution_for_target(Eigen::Index d, double target_size) {
  // Invert target = (3 / res)^(d-1); clamp into the legal (0, 1] range.
  const double res =
      3.0 / std::pow(target_size, 1.0 / static_cast<double>(d - 1));
  return std::min(1.0, res);
}

void validate_eps_delta(double eps, double delta) {
  if (!(eps >= 0.0) || !(eps < 0.25))
    throw DomainError("contamination level must lie in [0, 0.25)");
  if (!(delta > 0.0) || !(delta < 1.0))
    throw DomainError("failure probability must lie in (0, 1)");
}

// Median over rows of |<x_i, theta>|. proj and scratch are caller-owned
// buffers of size N; scratch is reordered.
double median_abs_projection(const Eigen::MatrixXd& rows,
                             const Eigen::VectorXd& theta,
                             Eigen::VectorXd& proj,
                             std::vector<double>& scratch) {
  proj.noalias() = rows * theta;
  const Eigen::Index n = rows.rows();
  for (Eigen::Index i = 0; i < n; ++i)
    scratch[static_cast<std::size_t>(i)] = std::fabs(proj(i));
  return median_inplace(scratch);
}

double quad_form(const Eigen::MatrixXd& gamma, const Eigen::VectorXd& theta,
                 Eigen::VectorXd& gth) {
  gth.noalias() = gamma * theta;
  return theta.dot(gth);
}

Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& m) {
  return 0.5 * (m + m.transpose());
}

// Frobenius projection onto the PSD cone: clip negative eigenvalues.
Eigen::MatrixXd clip_psd(const Eigen::MatrixXd& sym) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  const Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
  return symmetrize(es.eigenvectors() * ev.asDiagonal() *
                    es.eigenvectors().transpose());
}

// Frobenius projection onto {Gamma : Gamma <= cap} via the PSD projection
// of the slack matrix cap - Gamma.
Eigen::MatrixXd project_loewner_cap(const Eigen::MatrixXd& sym,
                                    const Eigen::MatrixXd& cap) {
  return symmetrize(cap - clip_psd(cap - sym));
}

// Frobenius projection onto {Gamma : ||Gamma|| <= bound}: clamp eigenvalues
// into [-bound, bound].
Eigen::MatrixXd project_opnorm_ball(const Eigen::MatrixXd& sym,
                                    double bound) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  const Eigen::VectorXd ev =
      es.eigenvalues().cwiseMax(-bound).cwiseMin(bound);
  return symmetrize(es.eigenvectors() * ev.asDiagonal() *
                    es.eigenvectors().transpose());
}

}  // namespace

TruncatedPosteriorParams::TruncatedPosteriorParams(int beta_in, SpdMatrix g,
                                                   double omega_in,
                                                   Eigen::VectorXd center_in,
                                                   double tau)
    : beta(beta_in),
      G(std::move(g)),
      omega(omega_in),
      center(std::move(center_in)) {
  if (beta < 1) throw DomainError("posterior beta must be >= 1");
  if (!(omega > 0.0)) throw DomainError("omega must be positive");
  if (!(tau >= 0.0)) throw DomainError("trace proxy must be nonnegative");
  if (center.size() < 1 || center.size() != G.dim())
    throw DomainError("center dimension does not match G");
  if (std::fabs(center.norm() - 1.0) > 1e-6)
    throw DomainError("center must be unit length");
  radius = 100.0 * std::sqrt(omega);
  const double needed = 20.0 * tau / static_cast<double>(beta);
  if (radius * radius < needed) {
    std::ostringstream msg;
    msg << "inadmissible posterior: radius^2 = " << radius * radius
        << " is below 20*tau/beta = " << needed;
    throw InadmissibleParametersError(msg.str());
  }
}

// Shared rejection loop: m accepted displacements theta - v as rows. The
// truncation indicator u' G u <= radius^2 never reads the center, so these
// are center-free; callers add the center themselves if they need thetas.
static Eigen::MatrixXd ambient_offsets(const TruncatedPosteriorParams& params,
                                       int m, RngStream& rng, double* rate) {
  if (m < 1) throw DomainError("need at least one draw");
  const Eigen::Index d = params.dim();
  const double root_beta = std::sqrt(static_cast<double>(params.beta));
  const double radius2 = params.radius * params.radius;
  const std::int64_t cap = 20ll * m;

  Eigen::MatrixXd offsets(m, d);
  Eigen::VectorXd u(d), gu(d);
  std::int64_t proposed = 0;
  int accepted = 0;
  while (accepted < m && proposed < cap) {
    for (Eigen::Index i = 0; i < d; ++i) u(i) = rng.next_normal();
    u /= root_beta;
    ++proposed;
    if (quad_form(params.G.mat(), u, gu) <= radius2)
      offsets.row(accepted++) = u.transpose();
  }
  if (accepted < m) {
    std::ostringstream msg;
    msg << "posterior acceptance rate "
        << static_cast<double>(accepted) / static_cast<double>(proposed)
        << " after " << proposed
        << " proposals; truncation parameters are inadmissible";
    throw InadmissibleParametersError(msg.str());
  }
  *rate = static_cast<double>(accepted) / static_cast<double>(proposed);
  return offsets;
}

PosteriorDraws sample_posterior(const TruncatedPosteriorParams& params, int m,
                                RngStream rng) {
  PosteriorDraws out;
  out.thetas = ambient_offsets(params, m, rng, &out.acceptance_rate);
  out.thetas.rowwise() += params.center.transpose();
  return out;
}

SpdMatrix estimate_H(const TruncatedPosteriorParams& params, int m,
                     RngStream rng) {
  double rate = 1.0;
  const Eigen::MatrixXd offsets = ambient_offsets(params, m, rng, &rate);
  Eigen::MatrixXd h = offsets.transpose() * offsets;
  h /= static_cast<double>(m);
  return SpdMatrix(symmetrize(h));
}

PosteriorPool whitened_posterior_pool(const Eigen::MatrixXd& rows,
                                      const TruncatedPosteriorParams& params,
                                      int m, RngStream rng) {
  if (m < 1) throw DomainError("need at least one draw");
  if (rows.rows() < 1) throw InsufficientDataError("empty sample");
  if (rows.cols() != params.dim())
    throw DomainError("sample dimension does not match parameters");

  const Eigen::Index d = rows.cols();
  // Data-whitened proposals: unit covariance like the ambient sampler's
  // z/sqrt(beta), but built from the sample's own rows, so the offsets
  // co-rotate with the data and are invariant under data scaling. That is
  // what makes the downstream fit equivariant on both counts.
  const double scale = std::sqrt(static_cast<double>(params.beta));
  const double radius2 = params.radius * params.radius;
  const int batch = m + (m & 1);
  const std::int64_t cap = 20ll * m;

  Eigen::MatrixXd pool(d, m);
  Eigen::VectorXd u(d), gu(d);
  std::int64_t proposed = 0;
  std::uint64_t batch_index = 0;
  int accepted = 0;
  while (accepted < m && proposed < cap) {
    const Eigen::MatrixXd draws =
        whitened_direction_draws(rows, batch, rng.child(batch_index++));
    for (Eigen::Index c = 0;
         c < draws.cols() && accepted < m && proposed < cap; ++c) {
      u = draws.col(c) / scale;
      ++proposed;
      if (quad_form(params.G.mat(), u, gu) <= radius2) pool.col(accepted++) = u;
    }
  }
  if (accepted < m) {
    std::ostringstream msg;
    msg << "pool acceptance rate "
        << static_cast<double>(accepted) / static_cast<double>(proposed)
        << " after " << proposed
        << " proposals; truncation parameters are inadmissible";
    throw InadmissibleParametersError(msg.str());
  }
  PosteriorPool out;
  out.offsets = std::move(pool);
  out.acceptance_rate =
      static_cast<double>(accepted) / static_cast<double>(proposed);
  return out;
}

FeasibleSetH::FeasibleSetH(SpdMatrix h, double alpha, double omega,
                           SpdMatrix g, double eps, double delta,
                           Eigen::Index sample_size, double c_const)
    : h_(std::move(h)),
      g_(std::move(g)),
      alpha_(alpha),
      omega_(omega),
      c_const_(c_const) {
  if (h_.dim() != g_.dim())
    throw DomainError("H and G dimensions do not match");
  if (!(alpha_ >= 0.0)) throw DomainError("trace target must be nonnegative");
  if (!(omega_ > 0.0)) throw DomainError("omega must be positive");
  if (!(eps >= 0.0) || !(eps < 1.0))
    throw DomainError("contamination level must lie in [0, 1)");
  if (!(delta > 0.0) || !(delta < 1.0))
    throw DomainError("failure probability must lie in (0, 1)");
  if (sample_size < 1) throw DomainError("sample size must be positive");
  if (!(c_const_ > 0.0)) throw DomainError("slack constant must be positive");

  slack_ = c_const_ *
           (std::sqrt((g_.effective_rank() + std::log(1.0 / delta)) /
                      static_cast<double>(sample_size)) +
            eps);
  slab_lower_ = alpha_ / (1.0 + slack_);
  slab_upper_ = slack_ < 1.0 ? alpha_ / (1.0 - slack_) : kInf;
  cap_ = 10.0 * g_.mat();

  // Nonemptiness witness: a scaled identity t*I must fit under both spectral
  // caps while meeting the trace floor. Configurations without an identity
  // witness are rejected here even if some non-identity member existed.
  const double trace_h = h_.trace();
  if (trace_h <= 0.0) {
    if (alpha_ > 0.0)
      throw ConfigError(
          "feasible set is empty: posterior covariance H is zero, so "
          "tr(Gamma H) = 0 and the trace constraint tr(Gamma H) near alpha = " +
          std::to_string(alpha_) + " cannot be met");
    return;  // t = 0 is a witness
  }
  const double t_floor = slab_lower_ / trace_h;
  const double cap_loewner = 10.0 * g_.eigenvalues()(0);
  const double cap_opnorm = 10.0 * omega_;
  const double t_cap = std::min(cap_loewner, cap_opnorm);
  if (t_floor > t_cap * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "feasible set is empty: the trace constraint needs a scaled "
           "identity with t >= "
        << t_floor << ", but ";
    if (cap_loewner <= cap_opnorm)
      msg << "the Loewner cap 10*G allows at most t = " << cap_loewner;
    else
      msg << "the operator-norm cap 10*omega allows at most t = " << cap_opnorm;
    throw ConfigError(msg.str());
  }
}

double FeasibleSetH::Residuals::max_violation() const {
  return std::max(std::max(psd, loewner), std::max(opnorm, trace));
}

FeasibleSetH::Residuals FeasibleSetH::residuals(
    const Eigen::MatrixXd& gamma) const {
  if (gamma.rows() != dim() || gamma.cols() != dim())
    throw DomainError("matrix dimension does not match the feasible set");
  const Eigen::MatrixXd sym = symmetrize(gamma);

  Residuals r;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  const double lo = es.eigenvalues()(0);
  const double hi = es.eigenvalues()(es.eigenvalues().size() - 1);
  const double op = std::max(std::fabs(lo), std::fabs(hi));
  r.psd = std::max(0.0, -lo) / (1.0 + op);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> cap_es(sym - cap_);
  r.loewner = std::max(0.0, cap_es.eigenvalues()(dim() - 1)) /
              (1.0 + 10.0 * g_.opnorm());

  r.opnorm = std::max(0.0, op - 10.0 * omega_) / (1.0 + 10.0 * omega_);

  const double t = sym.cwiseProduct(h_.mat()).sum();
  double dist = std::max(0.0, slab_lower_ - t);
  if (std::isfinite(slab_upper_)) dist = std::max(dist, t - slab_upper_);
  r.trace = dist / (1.0 + std::fabs(alpha_));
  return r;
}

bool FeasibleSetH::contains(const Eigen::MatrixXd& gamma,
                            double rel_tol) const {
  return residuals(gamma).max_violation() <= rel_tol;
}

SpdMatrix project_feasible(const Eigen::MatrixXd& gamma_raw,
                           const FeasibleSetH& set, int max_sweeps) {
  const Eigen::Index d = set.dim();
  if (gamma_raw.rows() != d || gamma_raw.cols() != d)
    throw DomainError("matrix dimension does not match the feasible set");
  if (!gamma_raw.allFinite())
    throw DomainError("matrix entries must be finite");
  if (max_sweeps < 1) throw DomainError("need at least one sweep");

  const Eigen::MatrixXd& h = set.h().mat();
  const double h_frob2 = h.squaredNorm();
  const Eigen::MatrixXd cap = 10.0 * set.g().mat();
  const double bound = 10.0 * set.omega();
  const double lo = set.slab_lower();
  const double hi = set.slab_upper();

  // Dykstra: one correction term per constraint set; ends each sweep on the
  // PSD projection so the returned matrix is exactly PSD. The stop test must
  // watch the corrections too: the iterate can sit still for many sweeps
  // while the corrections redistribute, and breaking during that transient
  // returns an infeasible point.
  Eigen::MatrixXd x = symmetrize(gamma_raw);
  std::array<Eigen::MatrixXd, 4> corr;
  corr.fill(Eigen::MatrixXd::Zero(d, d));
  Eigen::MatrixXd y, prev, delta;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    prev = x;
    double corr_movement = 0.0;
    for (int s = 0; s < 4; ++s) {
      y = x + corr[static_cast<std::size_t>(s)];
      switch (s) {
        case 0: {
          x = y;
          if (h_frob2 > 0.0) {
            const double t = y.cwiseProduct(h).sum();
            if (t < lo)
              x = y + ((lo - t) / h_frob2) * h;
            else if (std::isfinite(hi) && t > hi)
              x = y - ((t - hi) / h_frob2) * h;
          }
          break;
        }
        case 1:
          x = project_loewner_cap(y, cap);
          break;
        case 2:
          x = project_opnorm_ball(y, bound);
          break;
        default:
          x = clip_psd(y);
          break;
      }
      delta = y - x;
      corr_movement += (delta - corr[static_cast<std::size_t>(s)]).norm();
      corr[static_cast<std::size_t>(s)] = delta;
    }
    if ((x - prev).norm() + corr_movement <= 1e-8 * (1.0 + x.norm())) break;
  }

  const FeasibleSetH::Residuals res = set.residuals(x);
  if (res.max_violation() > 1e-6) {
    std::ostringstream msg;
    msg << "alternating projections did not reach the feasible set within "
        << max_sweeps << " sweeps; relative residuals: psd=" << res.psd
        << " loewner=" << res.loewner << " opnorm=" << res.opnorm
        << " trace=" << res.trace;
    throw ProjectionFailedError(msg.str());
  }
  return SpdMatrix(x);
}

double cov_objective(const Eigen::MatrixXd& gamma, const Sample& sample,
                     const SphereNet& net,
                     const std::vector<Eigen::MatrixXd>& theta_draws) {
  if (sample.size() < 1) throw InsufficientDataError("empty sample");
  const Eigen::Index d = sample.dim();
  const Eigen::Index n = sample.size();
  if (gamma.rows() != d || gamma.cols() != d)
    throw DomainError("matrix dimension does not match sample");
  if (!gamma.allFinite()) throw DomainError("matrix entries must be finite");
  if (net.size() < 1) throw DomainError("empty sphere net");
  if (net.dim() != d) throw DomainError("net dimension does not match sample");
  if (static_cast<Eigen::Index>(theta_draws.size()) != net.size())
    throw DomainError("need one draw matrix per net direction");
  for (const Eigen::MatrixXd& th : theta_draws)
    if (th.rows() < 1 || th.cols() != d)
      throw DomainError("draw matrix shape does not match sample");

  Eigen::VectorXd proj(n), gth(d), theta(d);
  std::vector<double> scratch(static_cast<std::size_t>(n));
  std::vector<double> terms;
  double best = -kInf;
  for (Eigen::Index k = 0; k < net.size(); ++k) {
    const Eigen::MatrixXd& th = theta_draws[static_cast<std::size_t>(k)];
    const Eigen::Index mk = th.rows();
    terms.resize(static_cast<std::size_t>(mk));
    for (Eigen::Index j = 0; j < mk; ++j) {
      theta = th.row(j).transpose();
      const double med = median_abs_projection(sample.rows, theta, proj, scratch);
      const double q = std::fmax(quad_form(gamma, theta, gth), 0.0);
      terms[static_cast<std::size_t>(j)] =
          std::fabs(med - kNormalUpperQuartile * std::sqrt(q));
    }
    const double val =
        pairwise_sum(terms.data(), mk) / static_cast<double>(mk);
    if (val > best) best = val;
  }
  return best;
}

namespace {

// Frozen sample-average terms of the objective: per-(direction, draw)
// medians plus the shared offset pool. Medians do not depend on Gamma, so
// one build serves the whole optimization.
struct ObjectiveTerms {
  Eigen::MatrixXd medians;  // K x M
  Eigen::MatrixXd dirs;     // K x d
  Eigen::MatrixXd pool;     // d x M
};

ObjectiveTerms build_objective_terms(const Eigen::MatrixXd& rows,
                                     const SphereNet& net,
                                     const Eigen::MatrixXd& pool,
                                     int threads) {
  ObjectiveTerms t;
  t.dirs = net.directions;
  t.pool = pool;
  const Eigen::Index k = net.size();
  const Eigen::Index m = pool.cols();
  const Eigen::Index n = rows.rows();
  const Eigen::Index d = rows.cols();
  t.medians.resize(k, m);
  parallel_for(k, threads, [&](std::int64_t ki) {
    Eigen::VectorXd proj(n), theta(d);
    std::vector<double> scratch(static_cast<std::size_t>(n));
    for (Eigen::Index j = 0; j < m; ++j) {
      theta = t.dirs.row(ki).transpose() + t.pool.col(j);
      t.medians(ki, j) = median_abs_projection(rows, theta, proj, scratch);
    }
  });
  return t;
}

struct EvalScratch {
  Eigen::VectorXd theta;
  Eigen::VectorXd gth;
  std::vector<double> terms;
};

// Value of the frozen objective at gamma; argmax receives the first
// direction index attaining the max. Arithmetic matches cov_objective
// exactly, so values agree bitwise with the public evaluation on the same
// thetas.
double eval_objective(const Eigen::MatrixXd& gamma, const ObjectiveTerms& t,
                      Eigen::Index* argmax, EvalScratch& s) {
  const Eigen::Index k = t.medians.rows();
  const Eigen::Index m = t.medians.cols();
  s.terms.resize(static_cast<std::size_t>(m));
  double best = -kInf;
  Eigen::Index arg = 0;
  for (Eigen::Index ki = 0; ki < k; ++ki) {
    for (Eigen::Index j = 0; j < m; ++j) {
      s.theta = t.dirs.row(ki).transpose() + t.pool.col(j);
      const double q = std::fmax(quad_form(gamma, s.theta, s.gth), 0.0);
      s.terms[static_cast<std::size_t>(j)] =
          std::fabs(t.medians(ki, j) - kNormalUpperQuartile * std::sqrt(q));
    }
    const double val =
        pairwise_sum(s.terms.data(), m) / static_cast<double>(m);
    if (val > best) {
      best = val;
      arg = ki;
    }
  }
  if (argmax) *argmax = arg;
  return best;
}

// Subgradient of the active direction's mean term. Flat pieces (q = 0 or an
// exact tie med = q75*sqrt(q)) contribute zero.
void subgradient_at(const Eigen::MatrixXd& gamma, const ObjectiveTerms& t,
                    Eigen::Index active, Eigen::MatrixXd& grad,
                    EvalScratch& s) {
  const Eigen::Index m = t.medians.cols();
  const Eigen::Index d = t.dirs.cols();
  grad.setZero(d, d);
  for (Eigen::Index j = 0; j < m; ++j) {
    s.theta = t.dirs.row(active).transpose() + t.pool.col(j);
    const double q = std::fmax(quad_form(gamma, s.theta, s.gth), 0.0);
    if (q <= 0.0) continue;
    const double diff =
        t.medians(active, j) - kNormalUpperQuartile * std::sqrt(q);
    if (diff == 0.0) continue;
    const double coef = (diff > 0.0 ? -1.0 : 1.0) * kNormalUpperQuartile /
                        (2.0 * std::sqrt(q));
    grad.noalias() += (coef / static_cast<double>(m)) *
                      (s.theta * s.theta.transpose());
  }
  grad = symmetrize(grad);
}

struct RestartOutcome {
  Eigen::MatrixXd gamma;
  double objective = kInf;
  int evals = 0;
  std::vector<double> trace;
};

// Symmetric matrix with iid standard normal upper triangle, unit Frobenius
// norm (zero stays zero).
Eigen::MatrixXd random_unit_symmetric(Eigen::Index d, RngStream& rng) {
  Eigen::MatrixXd s(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = i; j < d; ++j) {
      const double v = rng.next_normal();
      s(i, j) = v;
      s(j, i) = v;
    }
  const double fr = s.norm();
  if (fr > 0.0) s /= fr;
  return s;
}

// One restart: a diminishing-step projected subgradient phase from a
// perturbed start, then a monotone adaptive line-search polish that falls
// back to random probe directions when the subgradient direction stalls at a
// kink of the max.
RestartOutcome run_restart(int index, const Eigen::MatrixXd& gamma0,
                           double spread, double eta0,
                           const ObjectiveTerms& terms,
                           const FeasibleSetH& set,
                           const CovarianceConfig& cfg, RngStream rng) {
  const Eigen::Index d = gamma0.rows();
  Eigen::MatrixXd start = gamma0;
  if (index > 0) {
    const Eigen::MatrixXd dir = random_unit_symmetric(d, rng);
    // The perturbation size depends only on the restart index, never on the
    // restart count, so growing the count keeps earlier restarts bitwise
    // identical and the best-of-restarts objective nonincreasing.
    const double sigma =
        spread * (1.0 - std::pow(0.5, static_cast<double>(index)));
    start = project_feasible(gamma0 + sigma * dir, set).mat();
  }

  EvalScratch s;
  s.theta.resize(d);
  s.gth.resize(d);

  RestartOutcome out;
  out.gamma = start;
  Eigen::Index arg = 0;
  double f_current = eval_objective(start, terms, &arg, s);
  out.objective = f_current;
  out.evals = 1;
  out.trace.push_back(out.objective);
  Eigen::Index best_arg = arg;

  Eigen::MatrixXd current = start;
  Eigen::MatrixXd grad(d, d);
  for (int it = 1; it <= cfg.subgradient_steps; ++it) {
    subgradient_at(current, terms, arg, grad, s);
    const double gn = grad.norm();
    if (!(gn > 1e-14 * (1.0 + std::fabs(f_current)))) break;
    current = project_feasible(
                  current - (eta0 / std::sqrt(static_cast<double>(it))) *
                                (grad / gn),
                  set)
                  .mat();
    f_current = eval_objective(current, terms, &arg, s);
    ++out.evals;
    if (f_current < out.objective) {
      out.objective = f_current;
      out.gamma = current;
      best_arg = arg;
    }
    out.trace.push_back(out.objective);
  }

  // Polish: one candidate per step, multiplicative step adaptation. A failed
  // subgradient step retries with a random symmetric probe at the same
  // scale, which escapes kinks the single-term subgradient cannot see. The
  // step only ever follows the multiplicative schedule (no resets), and the
  // probe direction for step `it` comes from a child stream indexed by `it`,
  // so a flipped accept/reject decision near the floating point noise floor
  // perturbs later iterates by at most the current (already small) step
  // instead of restarting the walk at a large one.
  double step = eta0 / std::sqrt(static_cast<double>(
                            std::max(cfg.subgradient_steps, 1)));
  bool probing = false;
  Eigen::MatrixXd dir(d, d), cand;
  for (int it = 0; it < cfg.polish_steps; ++it) {
    if (!probing) {
      subgradient_at(out.gamma, terms, best_arg, grad, s);
      const double gn = grad.norm();
      if (gn > 0.0)
        dir = -grad / gn;
      else
        probing = true;
    }
    if (probing) {
      RngStream probe_rng = rng.child(static_cast<std::uint64_t>(it));
      dir = random_unit_symmetric(d, probe_rng);
    }

    cand = project_feasible(out.gamma + step * dir, set).mat();
    const double fc = eval_objective(cand, terms, &arg, s);
    ++out.evals;
    if (fc < out.objective) {
      out.gamma = cand;
      out.objective = fc;
      best_arg = arg;
      step *= 1.5;
      probing = false;
    } else {
      step *= 0.5;
      probing = !probing;
      if (step < 1e-13 * eta0) break;
    }
    out.trace.push_back(out.objective);
  }
  return out;
}

}  // namespace

SphereNet default_cov_net(Eigen::Index d) {
  if (d == 1) return build_sphere_net(1, 1.0, RngStream(kCovNetSeed, 0));
  if (d == 2)
    return build_sphere_net(2, 3.14159265358979323846 / 90.0,
                            RngStream(kCovNetSeed, 0));
  return build_sphere_net(d, resolution_for_target(d, 400.0),
                          RngStream(kCovNetSeed, 0));
}

std::pair<SpdMatrix, EstimatorReport> estimate_covariance(
    const Sample& contaminated, double eps, double delta,
    const CovarianceConfig& cfg) {
  const auto start_time = std::chrono::steady_clock::now();
  validate_eps_delta(eps, delta);
  if (contaminated.size() < 20)
    throw InsufficientDataError("need at least 20 rows");
  const Eigen::Index d = contaminated.dim();
  const Eigen::Index n = contaminated.size();
  if (d < 1) throw DomainError("sample must have at least one column");

  if (cfg.beta < 0) throw DomainError("beta override must be >= 1 (0 tunes)");
  if (cfg.omega < 0.0)
    throw DomainError("omega override must be > 0 (0 tunes)");
  if (cfg.alpha && !(*cfg.alpha >= 0.0))
    throw DomainError("alpha override must be nonnegative");
  if (cfg.shape_G && cfg.shape_G->dim() != d)
    throw DomainError("G override dimension does not match sample");
  if (cfg.posterior_H && cfg.posterior_H->dim() != d)
    throw DomainError("H override dimension does not match sample");
  if (!(cfg.c_const > 0.0)) throw DomainError("slack constant must be positive");
  if (cfg.mc_draws < 2) throw DomainError("need at least 2 pool draws");
  if (cfg.h_draws < 2) throw DomainError("need at least 2 posterior draws");
  if (cfg.restarts < 1) throw DomainError("need at least one restart");
  if (cfg.subgradient_steps < 1)
    throw DomainError("need at least one subgradient step");
  if (cfg.polish_steps < 0) throw DomainError("polish budget must be >= 0");
  SphereNet net;
  if (cfg.net.size() > 0) {
    if (cfg.net.dim() != d)
      throw DomainError("net dimension does not match sample");
    if (cfg.net.size() < 2)
      throw DomainError("net must hold at least 2 directions");
    net = cfg.net;
  } else {
    net = default_cov_net(d);
  }

  // Tuned or supplied parameters; tau always comes from the data because the
  // admissibility check is about this sample.
  const SpdMatrix shape =
      cfg.shape_G ? *cfg.shape_G : construct_G(contaminated, eps);
  const double tau = robust_trace(contaminated, eps);
  const double omega =
      cfg.omega > 0.0 ? cfg.omega : robust_opnorm(contaminated, net);
  if (!(omega > 0.0))
    throw RankDegenerateError("every net projection has zero MAD");
  int beta = cfg.beta;
  if (beta < 1) {
    const long long rounded = std::llround(tau / omega);
    beta = static_cast<int>(std::max(1ll, rounded));
  }

  Eigen::VectorXd e1 = Eigen::VectorXd::Zero(d);
  e1(0) = 1.0;
  const TruncatedPosteriorParams posterior(beta, shape, omega, e1, tau);

  const PosteriorPool pool =
      whitened_posterior_pool(contaminated.rows, posterior, cfg.mc_draws,
                              cfg.seed.child(kCovPoolStage));

  const SpdMatrix h_mat =
      cfg.posterior_H
          ? *cfg.posterior_H
          : estimate_H(posterior, cfg.h_draws,
                       cfg.seed.child(kCovPosteriorCovStage));
  const double alpha =
      cfg.alpha ? *cfg.alpha : estimate_alpha(contaminated, h_mat);

  const FeasibleSetH feasible(h_mat, alpha, omega, shape, eps, delta, n,
                              cfg.c_const);

  const int threads = resolve_threads(0);
  const ObjectiveTerms terms =
      build_objective_terms(contaminated.rows, net, pool.offsets, threads);

  const SpdMatrix gamma0 =
      project_feasible(trimmed_cov(contaminated, eps).mat(), feasible);
  double eta0 = gamma0.opnorm() / 10.0;
  if (!(eta0 > 0.0)) eta0 = (1.0 + 10.0 * omega) / 10.0;
  const double spread = std::max(gamma0.opnorm(), omega);

  const RngStream restart_seed = cfg.seed.child(kCovRestartStage);
  std::vector<RestartOutcome> outcomes(static_cast<std::size_t>(cfg.restarts));
  parallel_for(cfg.restarts, threads, [&](std::int64_t r) {
    outcomes[static_cast<std::size_t>(r)] = run_restart(
        static_cast<int>(r), gamma0.mat(), spread, eta0, terms, feasible, cfg,
        restart_seed.child(static_cast<std::uint64_t>(r)));
  });

  std::size_t winner = 0;
  for (std::size_t r = 1; r < outcomes.size(); ++r)
    if (outcomes[r].objective < outcomes[winner].objective) winner = r;

  EstimatorReport report;
  report.estimate_matrix = outcomes[winner].gamma;
  report.objective = outcomes[winner].objective;
  report.mc_draws = cfg.mc_draws;
  report.seed = cfg.seed.seed();
  report.stream = cfg.seed.stream_id();
  report.beta = static_cast<double>(beta);
  report.omega = omega;
  report.alpha = alpha;
  report.acceptance_rate = pool.acceptance_rate;
  report.objective_trace = outcomes[winner].trace;
  int total_evals = 0;
  for (std::size_t r = 0; r < outcomes.size(); ++r) {
    total_evals += outcomes[r].evals;
    report.restarts.push_back(RestartRecord{static_cast<int>(r),
                                            outcomes[r].objective,
                                            outcomes[r].evals});
  }
  report.iterations = total_evals;
  report.runtime_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - start_time)
                          .count();
  return {SpdMatrix(outcomes[winner].gamma), report};
}

}  // namespace robust
