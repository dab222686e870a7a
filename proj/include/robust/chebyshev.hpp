#pragma once

#include <Eigen/Dense>
#include <vector>

#include "robust/sphere_net.hpp"

namespace robust {

struct ChebyshevResult {
  Eigen::VectorXd center;
  // max_v |value_v - <center, v>|, recomputed at the returned center.
  double objective = 0.0;
  // Simplex pivots spent (0 for the d = 1 closed form).
  int iterations = 0;
  // True when none of the random-restart descents found a strictly better
  // point than the solver (within tol). The solver answer is returned either
  // way; a false flag marks the rare event that a restart won.
  bool certified = true;
  // Best restart objective minus solver objective (>= -tol when certified).
  double restart_gap = 0.0;
};

// Minimizes f(nu) = max_v |values[v] - <nu, v>| over nu in R^d for the given
// direction net. d = 1 is solved in closed form; d >= 2 is solved exactly as
// a linear program (simplex on the dual), then cross-checked against the
// best of `restarts` projected-subgradient descents from random starts.
// tol <= 0 selects the default 1e-6 * (1 + max |values|).
ChebyshevResult chebyshev_center(const SphereNet& net,
                                 const std::vector<double>& values,
                                 double tol = -1.0, int restarts = 10);

// Objective evaluation helper (shared with tests).
double directional_gap(const SphereNet& net, const std::vector<double>& values,
                       const Eigen::VectorXd& nu);

}  // namespace robust
