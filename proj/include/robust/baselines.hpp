#pragma once

#include <Eigen/Dense>

#include "robust/sample.hpp"
#include "robust/spd.hpp"

namespace robust {

// Classical estimators the benchmarks compare against. None of them reads
// contaminated_idx: they see exactly what the robust estimators see.

// Arithmetic mean of the rows.
Eigen::VectorXd sample_mean(const Sample& sample);

// Coordinatewise median (lower-middle convention for even N, matching the
// engine-wide quantile rule).
Eigen::VectorXd coord_median(const Sample& sample);

// Geometric median by Weiszfeld iteration started at the coordinatewise
// median. Distances are floored at a relative ridge so an iterate landing on
// a data point never divides by zero. Stops when the iterate moves less than
// tol * (1 + ||y||) or after max_iters sweeps, whichever comes first.
Eigen::VectorXd geometric_median(const Sample& sample, double tol = 1e-8,
                                 int max_iters = 200);

// Coordinatewise symmetrically trimmed mean with per-side trim fraction
// min(eps + 0.02, 0.45). The margin keeps a strict majority of clean points
// inside the kept band even when the adversary splits its budget per side.
Eigen::VectorXd trimmed_mean(const Sample& sample, double eps);

// Uncentered second-moment matrix (1/N) * sum x x^T; the covariance under
// the zero-mean model.
SpdMatrix sample_cov(const Sample& sample);

// Second-moment matrix after dropping the ceil(eps*N) rows of largest norm
// (ties broken by index); the divisor is the surviving count, so a clean
// sample is estimated without the downward bias of the removed mass.
SpdMatrix trimmed_cov(const Sample& sample, double eps);

}  // namespace robust
