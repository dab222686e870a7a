#include "robust/chebyshev.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "robust/errors.hpp"
#include "robust/rng.hpp"

namespace robust {

namespace {

// The minimization of max_v |m_v - <nu, v>| is the LP
//   min t  s.t.  <nu, v_k> - t <= m_k,  -<nu, v_k> - t <= -m_k.
// Its dual, solved here by revised simplex with Bland's rule, is
//   max sum_k m_k (y-_k - y+_k)
//   s.t. sum_k (y+_k - y-_k) v_k = 0,  sum_k (y+_k + y-_k) = 1,  y >= 0,
// a problem over n = 2K nonnegative variables with d + 1 equality rows.
// The optimal primal pair (nu, t) is read off the simplex multipliers.
class DualSimplex {
 public:
  DualSimplex(const SphereNet& net, const std::vector<double>& values) {
    const Eigen::Index k = net.size();
    const Eigen::Index d = net.dim();
    rows_ = d + 1;
    cols_ = 2 * k;
    a_.resize(rows_, cols_);
    a_.topLeftCorner(d, k) = net.directions.transpose();
    a_.topRightCorner(d, k) = -net.directions.transpose();
    a_.row(d).setOnes();
    cost_.resize(cols_);
    for (Eigen::Index j = 0; j < k; ++j) {
      cost_(j) = -values[static_cast<std::size_t>(j)];
      cost_(k + j) = values[static_cast<std::size_t>(j)];
    }
    b_ = Eigen::VectorXd::Zero(rows_);
    b_(rows_ - 1) = 1.0;
    scale_ = 1.0 + cost_.cwiseAbs().maxCoeff();
  }

  // Runs both phases; returns the primal minimizer nu.
  Eigen::VectorXd solve(int& pivots) {
    basis_.resize(rows_);
    for (Eigen::Index i = 0; i < rows_; ++i) basis_[i] = cols_ + i;

    // Phase 1: drive the artificial variables (indices >= cols_) to zero.
    Eigen::VectorXd phase1_cost = Eigen::VectorXd::Zero(cols_ + rows_);
    phase1_cost.tail(rows_).setConstant(-1.0);
    pivots += iterate(phase1_cost, /*allow_artificial=*/true);
    const Eigen::VectorXd xb = basic_values();
    double artificial_mass = 0.0;
    for (Eigen::Index i = 0; i < rows_; ++i)
      if (basis_[i] >= cols_) artificial_mass += std::fabs(xb(i));
    if (artificial_mass > 1e-9)
      throw Error("direction-net program is infeasible");
    evict_artificials(pivots);

    Eigen::VectorXd phase2_cost = Eigen::VectorXd::Zero(cols_ + rows_);
    phase2_cost.head(cols_) = cost_;
    pivots += iterate(phase2_cost, /*allow_artificial=*/false);

    // Multipliers of the optimal basis give the primal solution: with
    // pi = B^-T c_B, nu = -pi.head(d).
    const Eigen::VectorXd pi = factor().transpose().solve(basis_cost(phase2_cost));
    return -pi.head(rows_ - 1);
  }

 private:
  Eigen::MatrixXd basis_matrix() const {
    Eigen::MatrixXd b(rows_, rows_);
    for (Eigen::Index i = 0; i < rows_; ++i) b.col(i) = column(basis_[i]);
    return b;
  }

  Eigen::FullPivLU<Eigen::MatrixXd> factor() const {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(basis_matrix());
    if (!lu.isInvertible()) throw Error("singular simplex basis");
    return lu;
  }

  Eigen::VectorXd column(Eigen::Index j) const {
    if (j < cols_) return a_.col(j);
    return Eigen::VectorXd::Unit(rows_, j - cols_);
  }

  Eigen::VectorXd basic_values() const { return factor().solve(b_); }

  Eigen::VectorXd basis_cost(const Eigen::VectorXd& full_cost) const {
    Eigen::VectorXd cb(rows_);
    for (Eigen::Index i = 0; i < rows_; ++i) cb(i) = full_cost(basis_[i]);
    return cb;
  }

  // Bland's rule on both the entering and leaving choices: no cycling even
  // though the right-hand side makes every vertex degenerate.
  int iterate(const Eigen::VectorXd& full_cost, bool allow_artificial) {
    const double entering_tol = 1e-10 * scale_;
    const Eigen::Index limit = allow_artificial ? cols_ + rows_ : cols_;
    int steps = 0;
    const int cap = 2000 + 60 * static_cast<int>(cols_);
    std::vector<char> in_basis(static_cast<std::size_t>(cols_ + rows_), 0);
    for (Eigen::Index i = 0; i < rows_; ++i) in_basis[static_cast<std::size_t>(basis_[i])] = 1;
    while (true) {
      if (++steps > cap) throw Error("simplex pivot limit exceeded");
      Eigen::FullPivLU<Eigen::MatrixXd> lu = factor();
      const Eigen::VectorXd xb = lu.solve(b_);
      const Eigen::VectorXd pi = lu.transpose().solve(basis_cost(full_cost));
      const Eigen::VectorXd reduced =
          full_cost.head(cols_) - a_.transpose() * pi;

      Eigen::Index enter = -1;
      for (Eigen::Index j = 0; j < limit; ++j) {
        if (in_basis[static_cast<std::size_t>(j)]) continue;
        const double rj = j < cols_ ? reduced(j)
                                    : full_cost(j) - pi(j - cols_);
        if (rj > entering_tol) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return steps - 1;

      const Eigen::VectorXd dir = lu.solve(column(enter));
      Eigen::Index leave = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < rows_; ++i) {
        if (dir(i) <= 1e-11) continue;
        const double ratio = std::max(xb(i), 0.0) / dir(i);
        if (ratio < best_ratio - 1e-15 ||
            (ratio <= best_ratio + 1e-15 &&
             (leave < 0 || basis_[i] < basis_[leave]))) {
          best_ratio = ratio;
          leave = i;
        }
      }
      if (leave < 0) throw UnboundedProblemError("dual simplex direction unbounded");
      in_basis[static_cast<std::size_t>(basis_[leave])] = 0;
      in_basis[static_cast<std::size_t>(enter)] = 1;
      basis_[leave] = enter;
    }
  }

  // Pivot any artificial still basic (at level zero) out of the basis so the
  // phase-2 multipliers carry no artificial cost. A row with no eligible
  // replacement column would mean the net fails to span, which the builders
  // rule out.
  void evict_artificials(int& pivots) {
    for (Eigen::Index i = 0; i < rows_; ++i) {
      if (basis_[i] < cols_) continue;
      Eigen::FullPivLU<Eigen::MatrixXd> lu = factor();
      bool replaced = false;
      for (Eigen::Index j = 0; j < cols_ && !replaced; ++j) {
        bool already = false;
        for (Eigen::Index r = 0; r < rows_; ++r) already |= (basis_[r] == j);
        if (already) continue;
        const Eigen::VectorXd dir = lu.solve(column(j));
        if (std::fabs(dir(i)) > 1e-8) {
          basis_[i] = j;
          ++pivots;
          replaced = true;
        }
      }
      if (!replaced) throw Error("redundant constraint row in direction net");
    }
  }

  Eigen::MatrixXd a_;
  Eigen::VectorXd cost_;
  Eigen::VectorXd b_;
  double scale_ = 1.0;
  Eigen::Index rows_ = 0;
  Eigen::Index cols_ = 0;
  std::vector<Eigen::Index> basis_;
};

// Polyak-step subgradient descent toward the known optimal value. Used only
// as an independent check on the simplex answer.
Eigen::VectorXd subgradient_descent(const SphereNet& net,
                                    const std::vector<double>& values,
                                    Eigen::VectorXd nu, double f_target,
                                    int steps) {
  Eigen::VectorXd best = nu;
  double best_f = directional_gap(net, values, nu);
  for (int s = 0; s < steps; ++s) {
    Eigen::Index worst = 0;
    double worst_gap = -1.0;
    double worst_signed = 0.0;
    const Eigen::VectorXd proj = net.directions * nu;
    for (Eigen::Index k = 0; k < net.size(); ++k) {
      const double signed_gap = proj(k) - values[static_cast<std::size_t>(k)];
      if (std::fabs(signed_gap) > worst_gap) {
        worst_gap = std::fabs(signed_gap);
        worst_signed = signed_gap;
        worst = k;
      }
    }
    if (worst_gap < best_f) {
      best_f = worst_gap;
      best = nu;
    }
    const double step = worst_gap - f_target;
    if (step <= 0.0) break;
    const double sign = worst_signed >= 0.0 ? 1.0 : -1.0;
    nu -= (sign * step) * net.directions.row(worst).transpose();
  }
  const double final_f = directional_gap(net, values, nu);
  if (final_f < best_f) best = nu;
  return best;
}

}  // namespace

double directional_gap(const SphereNet& net, const std::vector<double>& values,
                       const Eigen::VectorXd& nu) {
  const Eigen::VectorXd proj = net.directions * nu;
  double worst = 0.0;
  for (Eigen::Index k = 0; k < net.size(); ++k)
    worst = std::max(worst,
                     std::fabs(values[static_cast<std::size_t>(k)] - proj(k)));
  return worst;
}

ChebyshevResult chebyshev_center(const SphereNet& net,
                                 const std::vector<double>& values,
                                 double tol, int restarts) {
  if (net.size() == 0) throw DomainError("empty sphere net");
  if (static_cast<Eigen::Index>(values.size()) != net.size())
    throw DomainError("one value per net direction required");
  double vmax = 0.0;
  for (double m : values) {
    if (!std::isfinite(m)) throw DomainError("directional values must be finite");
    vmax = std::max(vmax, std::fabs(m));
  }
  if (tol <= 0.0) tol = 1e-6 * (1.0 + vmax);

  ChebyshevResult result;
  const Eigen::Index d = net.dim();

  if (d == 1) {
    // One-dimensional case in closed form: |m_k - nu s_k| = |s_k m_k - nu|,
    // so the minimizer is the midrange of a_k = s_k m_k.
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (Eigen::Index k = 0; k < net.size(); ++k) {
      const double a = net.directions(k, 0) * values[static_cast<std::size_t>(k)];
      lo = std::min(lo, a);
      hi = std::max(hi, a);
    }
    result.center = Eigen::VectorXd::Constant(1, (hi + lo) / 2.0);
    result.objective = directional_gap(net, values, result.center);
    return result;
  }

  DualSimplex lp(net, values);
  result.center = lp.solve(result.iterations);
  result.objective = directional_gap(net, values, result.center);

  // Independent cross-check: restart descents must not beat the LP answer.
  // Step budget shrinks on huge nets so the certificate stays cheap.
  const double work = static_cast<double>(net.size()) * static_cast<double>(d);
  const int steps = static_cast<int>(std::max(30.0, std::min(300.0, 2e7 / std::max(work, 1.0))));
  RngStream cert_rng(0x9e3779b97f4a7c15ull, 7u);
  double best_restart = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_nu = result.center;
  for (int r = 0; r < restarts; ++r) {
    RngStream rs = cert_rng.child(static_cast<std::uint64_t>(r));
    Eigen::VectorXd start(d);
    for (Eigen::Index i = 0; i < d; ++i)
      start(i) = (1.0 + vmax) * rs.next_normal();
    // Target a value strictly below the LP answer so the descent genuinely
    // tries to beat it rather than stopping at parity.
    const Eigen::VectorXd cand = subgradient_descent(
        net, values, start, std::max(0.0, result.objective - 5.0 * tol), steps);
    const double f = directional_gap(net, values, cand);
    if (f < best_restart) {
      best_restart = f;
      best_nu = cand;
    }
  }
  if (restarts > 0) {
    result.restart_gap = best_restart - result.objective;
    if (result.restart_gap < -tol) {
      // A restart found a strictly better point; keep it and flag the miss.
      result.certified = false;
      result.center = best_nu;
      result.objective = best_restart;
    }
  }
  return result;
}

}  // namespace robust
