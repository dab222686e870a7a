#pragma once

#include <Eigen/Dense>
#include <cstddef>

#include "robust/rng.hpp"
#include "robust/sample.hpp"

namespace robust {

// Replacement budget: floor(epsilon * n), with a 1e-9 guard against float
// roundoff in the product. Throws BudgetError unless epsilon is in [0, 1/2).
std::size_t contamination_budget(double epsilon, std::size_t n);

enum class AdversaryKind {
  kHuber,      // replaces rows by draws from N(center, outlier_scale^2 I)
  kShift,      // replaces rows by center + magnitude * direction
  kCluster,    // replaces rows by the single point `center`
  kMedianTilt  // sample-aware: parks outliers just above a directional quantile
};

// Adversary description. `epsilon` is the contamination rate; the remaining
// fields are read per kind:
//   huber:       center (default 0), outlier_scale
//   shift:       center (default 0), direction, magnitude
//   cluster:     center
//   median_tilt: direction, tilt_offset_rel
struct AdversarySpec {
  AdversaryKind kind = AdversaryKind::kHuber;
  double epsilon = 0.0;
  Eigen::VectorXd direction;      // normalized internally; must be nonzero
  double magnitude = 0.0;
  Eigen::VectorXd center;         // empty means the origin
  double outlier_scale = 1.0;
  double tilt_offset_rel = 0.01;  // offset as a fraction of the projection MAD
};

// Applies the adversary: replaces exactly contamination_budget(eps, N) rows
// of a copy of `clean` and records which ones in contaminated_idx (sorted;
// diagnostics only). epsilon = 0 returns the input bit-identically. huber,
// shift, and cluster pick their victim rows uniformly without replacement
// from the stream; median_tilt is fully deterministic: it projects the clean
// rows onto `direction`, finds the (1/2 + eps)-quantile, and moves the rows
// with the smallest projections to that quantile plus a small offset along
// the direction, the placement that drags directional medians hardest.
Sample contaminate(const Sample& clean, const AdversarySpec& spec,
                   RngStream& rng);

}  // namespace robust
