#include "robust/report.hpp"

#include <json.hpp>

namespace robust {

namespace {

nlohmann::json vector_json(const Eigen::VectorXd& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

nlohmann::json matrix_json(const Eigen::MatrixXd& m) {
  // Row-major nested arrays with the dimension explicit alongside.
  nlohmann::json arr = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    arr.push_back(row);
  }
  return arr;
}

}  // namespace

std::string EstimatorReport::to_json() const {
  nlohmann::json j;
  if (estimate_matrix.size() > 0) {
    j["estimate"] = matrix_json(estimate_matrix);
    j["d"] = estimate_matrix.rows();
  } else {
    j["estimate"] = vector_json(estimate_vector);
    j["d"] = estimate_vector.size();
  }
  j["objective"] = objective;
  j["iterations"] = iterations;
  j["mc_draws"] = mc_draws;
  j["seed"] = seed;
  j["stream"] = stream;
  if (beta) j["beta"] = *beta;
  if (omega) j["omega"] = *omega;
  if (alpha) j["alpha"] = *alpha;
  if (acceptance_rate) j["acceptance_rate"] = *acceptance_rate;
  if (!per_direction.empty()) j["per_direction"] = per_direction;
  if (!objective_trace.empty()) j["objective_trace"] = objective_trace;
  if (!restarts.empty()) {
    nlohmann::json arr = nlohmann::json::array();
    for (const RestartRecord& r : restarts) {
      arr.push_back({{"index", r.index},
                     {"objective", r.objective},
                     {"iterations", r.iterations}});
    }
    j["restarts"] = arr;
  }
  j["runtime_ms"] = runtime_ms;
  return j.dump(2);
}

}  // namespace robust
