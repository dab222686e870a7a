#pragma once

#include <Eigen/Dense>
#include <vector>

namespace robust {

// A dataset: one observation per row. contaminated_idx records which rows an
// adversary replaced; it exists for diagnostics and tests only and no
// estimator may read it.
struct Sample {
  Eigen::MatrixXd rows;
  std::vector<Eigen::Index> contaminated_idx;

  Eigen::Index size() const { return rows.rows(); }
  Eigen::Index dim() const { return rows.cols(); }
};

}  // namespace robust
