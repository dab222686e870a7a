#include "robust/contamination.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "robust/errors.hpp"
#include "robust/orderstats.hpp"

namespace robust {

std::size_t contamination_budget(double epsilon, std::size_t n) {
  if (!(epsilon >= 0.0 && epsilon < 0.5)) {
    throw BudgetError("contamination: epsilon must lie in [0, 1/2)");
  }
  return static_cast<std::size_t>(
      std::floor(epsilon * static_cast<double>(n) + 1e-9));
}

namespace {

// First `k` entries of a uniform permutation of [0, n), Fisher-Yates driven
// by the stream; returned sorted.
std::vector<Eigen::Index> pick_rows(std::size_t k, std::size_t n,
                                    RngStream& rng) {
  std::vector<Eigen::Index> idx(n);
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(
                                  rng.next_u64() % static_cast<std::uint64_t>(n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

Eigen::VectorXd resolve_center(const AdversarySpec& spec, Eigen::Index d) {
  if (spec.center.size() == 0) return Eigen::VectorXd::Zero(d);
  if (spec.center.size() != d) {
    throw InvalidModelError("contaminate: center dimension mismatch");
  }
  return spec.center;
}

Eigen::VectorXd resolve_direction(const AdversarySpec& spec, Eigen::Index d) {
  if (spec.direction.size() != d) {
    throw InvalidModelError("contaminate: direction dimension mismatch");
  }
  const double norm = spec.direction.norm();
  if (norm == 0.0) {
    throw InvalidModelError("contaminate: direction must be nonzero");
  }
  return spec.direction / norm;
}

}  // namespace

Sample contaminate(const Sample& clean, const AdversarySpec& spec,
                   RngStream& rng) {
  const std::size_t n = static_cast<std::size_t>(clean.size());
  const Eigen::Index d = clean.dim();
  if (n == 0) throw InsufficientDataError("contaminate: empty sample");
  const std::size_t budget = contamination_budget(spec.epsilon, n);

  Sample out;
  out.rows = clean.rows;
  if (budget == 0) return out;

  switch (spec.kind) {
    case AdversaryKind::kHuber: {
      const Eigen::VectorXd center = resolve_center(spec, d);
      out.contaminated_idx = pick_rows(budget, n, rng);
      for (const Eigen::Index i : out.contaminated_idx) {
        for (Eigen::Index j = 0; j < d; ++j) {
          out.rows(i, j) = center(j) + spec.outlier_scale * rng.next_normal();
        }
      }
      break;
    }
    case AdversaryKind::kShift: {
      const Eigen::VectorXd center = resolve_center(spec, d);
      const Eigen::VectorXd u = resolve_direction(spec, d);
      const Eigen::VectorXd point = center + spec.magnitude * u;
      out.contaminated_idx = pick_rows(budget, n, rng);
      for (const Eigen::Index i : out.contaminated_idx) {
        out.rows.row(i) = point.transpose();
      }
      break;
    }
    case AdversaryKind::kCluster: {
      const Eigen::VectorXd center = resolve_center(spec, d);
      out.contaminated_idx = pick_rows(budget, n, rng);
      for (const Eigen::Index i : out.contaminated_idx) {
        out.rows.row(i) = center.transpose();
      }
      break;
    }
    case AdversaryKind::kMedianTilt: {
      // Deterministic, sample-aware. Uses no stream draws.
      const Eigen::VectorXd u = resolve_direction(spec, d);
      std::vector<double> proj(n);
      for (std::size_t i = 0; i < n; ++i) {
        proj[i] = clean.rows.row(static_cast<Eigen::Index>(i)).dot(u);
      }
      const double q = quantile(proj, 0.5 + spec.epsilon);
      const double med = quantile(proj, 0.5);
      std::vector<double> absdev(n);
      for (std::size_t i = 0; i < n; ++i) absdev[i] = std::fabs(proj[i] - med);
      const double mad = quantile_inplace(absdev, 0.5);
      const double offset =
          spec.tilt_offset_rel * (mad > 0.0 ? mad : 1e-12 * (1.0 + std::fabs(q)));
      // Moving the lowest projections above the median shifts every
      // directional rank statistic upward by the full budget.
      std::vector<Eigen::Index> order(n);
      std::iota(order.begin(), order.end(), Eigen::Index{0});
      std::stable_sort(order.begin(), order.end(),
                       [&](Eigen::Index a, Eigen::Index b) {
                         return proj[static_cast<std::size_t>(a)] <
                                proj[static_cast<std::size_t>(b)];
                       });
      order.resize(budget);
      std::sort(order.begin(), order.end());
      const Eigen::VectorXd point = (q + offset) * u;
      for (const Eigen::Index i : order) {
        out.rows.row(i) = point.transpose();
      }
      out.contaminated_idx = std::move(order);
      break;
    }
  }
  return out;
}

}  // namespace robust
