#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace robust {

struct RestartRecord {
  int index = 0;
  double objective = 0.0;
  int iterations = 0;
};

// Estimate plus diagnostics, produced by the mean and covariance estimators.
// Exactly one of estimate_vector / estimate_matrix is populated. Optional
// fields serialize only when set.
struct EstimatorReport {
  Eigen::VectorXd estimate_vector;
  Eigen::MatrixXd estimate_matrix;

  double objective = 0.0;
  int iterations = 0;
  int mc_draws = 0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  std::optional<double> beta;
  std::optional<double> omega;
  std::optional<double> alpha;
  std::optional<double> acceptance_rate;

  // Directional medians m_v in net order (mean estimator).
  std::vector<double> per_direction;
  // Best objective so far, per optimizer iteration (covariance estimator).
  std::vector<double> objective_trace;
  std::vector<RestartRecord> restarts;

  double runtime_ms = 0.0;

  std::string to_json() const;
};

}  // namespace robust
