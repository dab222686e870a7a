#pragma once

#include <Eigen/Dense>

#include "robust/rng.hpp"

namespace robust {

// Finite set of unit directions, closed under negation (v in the net implies
// -v is in the net, bitwise). Directions are rows.
struct SphereNet {
  Eigen::MatrixXd directions;
  double resolution = 0.0;

  Eigen::Index size() const { return directions.rows(); }
  Eigen::Index dim() const { return directions.cols(); }
};

// Builds the direction net used by the directional-median estimators.
// Requires 0 < resolution <= 1.
//   d = 1: the two signs {+1, -1} (resolution is recorded, not used).
//   d = 2: equiangular grid of ceil(2*pi / resolution) directions, rounded
//          up to even so the negation closure is exact; consecutive angular
//          gap is 2*pi / size.
//   d >= 3: ceil((3 / resolution)^(d-1)) directions, drawn i.i.d. uniform on
//          the sphere and symmetrized. Throws NetTooLargeError when that
//          count exceeds max_size; ask for a coarser resolution.
// The stream is consumed only for d >= 3.
SphereNet build_sphere_net(Eigen::Index d, double resolution, RngStream rng,
                           Eigen::Index max_size = 100000);

// Largest angle from a probe direction to its nearest net direction,
// estimated over `probes` uniform random directions. Test/diagnostic helper.
double net_covering_angle(const SphereNet& net, int probes, RngStream rng);

}  // namespace robust
