#include "robust/orderstats.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>

#include "robust/errors.hpp"
#include "robust/normal.hpp"
#include "robust/parallel.hpp"

namespace robust {

std::size_t quantile_rank(std::size_t n, double alpha) {
  if (n == 0) throw InsufficientDataError("quantile: empty sample");
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw DomainError("quantile: alpha must lie in (0,1]");
  }
  const double k = std::ceil(alpha * static_cast<double>(n) - 1e-9);
  if (k < 1.0) return 1;
  if (k > static_cast<double>(n)) return n;
  return static_cast<std::size_t>(k);
}

double quantile_inplace(std::vector<double>& xs, double alpha) {
  const std::size_t k = quantile_rank(xs.size(), alpha);
  std::nth_element(xs.begin(), xs.begin() + (k - 1), xs.end());
  return xs[k - 1];
}

double quantile(const std::vector<double>& xs, double alpha) {
  std::vector<double> copy(xs);
  return quantile_inplace(copy, alpha);
}

double median(const std::vector<double>& xs) { return quantile(xs, 0.5); }

double median_inplace(std::vector<double>& xs) {
  return quantile_inplace(xs, 0.5);
}

double empirical_orlicz_norm(const std::vector<double>& xs, double alpha) {
  if (alpha != 1.0 && alpha != 2.0) {
    throw DomainError("empirical_orlicz_norm: alpha must be 1 or 2");
  }
  if (xs.size() < 1000) {
    throw InsufficientDataError(
        "empirical_orlicz_norm: needs at least 1000 samples");
  }
  const std::int64_t n = static_cast<std::int64_t>(xs.size());
  std::vector<double> pow_buf(xs.size());
  double best = 0.0;
  for (int p = 2; p <= 10; p += 2) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
      pow_buf[i] = std::pow(std::fabs(xs[i]), p);
    }
    const double mp =
        std::pow(pairwise_sum(pow_buf.data(), n) / static_cast<double>(n),
                 1.0 / static_cast<double>(p));
    const double scale = alpha == 2.0 ? std::sqrt(static_cast<double>(p))
                                      : static_cast<double>(p);
    best = std::max(best, mp / scale);
  }
  return best;
}

namespace {

double population_quantile(TailDist dist, double level) {
  switch (dist) {
    case TailDist::kGaussian:
      return std_normal_quantile(level);
    case TailDist::kHalfNormal:
      return half_normal_quantile(level);
    case TailDist::kChi2One:
      return chi2_1_quantile(level);
  }
  throw DomainError("unknown tail distribution");
}

const char* dist_name(TailDist dist) {
  switch (dist) {
    case TailDist::kGaussian:
      return "gaussian";
    case TailDist::kHalfNormal:
      return "half_normal";
    case TailDist::kChi2One:
      return "chi2_1";
  }
  return "?";
}

bool near_integer(double x) { return std::fabs(x - std::round(x)) < 1e-9; }

}  // namespace

TailFitReport quantile_concentration_experiment(TailDist dist, double eps,
                                                std::int64_t n,
                                                std::int64_t trials,
                                                RngStream rng, int threads) {
  if (n < 3) throw InsufficientDataError("concentration: n must be at least 3");
  if (trials < 1000) {
    throw InsufficientDataError("concentration: needs at least 1000 trials");
  }
  if (!(eps >= 0.0 && eps < 0.5)) {
    throw DomainError("concentration: eps must lie in [0, 1/2)");
  }

  TailFitReport report;
  report.dist = dist_name(dist);
  report.eps = eps;
  report.n = n;
  report.trials = trials;
  report.family =
      dist == TailDist::kChi2One ? "subexponential" : "subgaussian";

  const double nd = static_cast<double>(n);
  const bool odd_median = eps == 0.0 && n % 2 == 1;
  if (!odd_median && (!near_integer((0.5 + eps) * nd) || !near_integer((0.5 - eps) * nd))) {
    report.warnings.push_back(
        "(1/2 +- eps) * n is not an integer; nearest-rank convention decides "
        "the studied order statistic");
  }

  const double level = 0.5 + eps;
  const double pop_q = population_quantile(dist, level);

  std::vector<double> deviations(trials);
  parallel_for(trials, resolve_threads(threads), [&](std::int64_t t) {
    RngStream local = rng.child(static_cast<std::uint64_t>(t));
    std::vector<double> draws(static_cast<std::size_t>(n));
    switch (dist) {
      case TailDist::kGaussian:
        for (auto& x : draws) x = local.next_normal();
        break;
      case TailDist::kHalfNormal:
        for (auto& x : draws) x = std::fabs(local.next_normal());
        break;
      case TailDist::kChi2One:
        for (auto& x : draws) {
          const double z = local.next_normal();
          x = z * z;
        }
        break;
    }
    deviations[t] = quantile_inplace(draws, level) - pop_q;
  });

  // Moments of the deviation, pairwise so the result has a fixed reduction
  // order regardless of where the trials ran.
  const double mean =
      pairwise_sum(deviations.data(), trials) / static_cast<double>(trials);
  std::vector<double> sq(deviations.size());
  for (std::size_t i = 0; i < deviations.size(); ++i) {
    const double c = deviations[i] - mean;
    sq[i] = c * c;
  }
  const double var =
      pairwise_sum(sq.data(), trials) / static_cast<double>(trials);
  report.mean_deviation = mean;
  report.n_times_var = nd * var;

  std::vector<double> scaled(deviations.size());
  for (std::size_t i = 0; i < deviations.size(); ++i) {
    scaled[i] = std::sqrt(nd) * deviations[i];
  }
  report.orlicz_scaled = empirical_orlicz_norm(
      scaled, dist == TailDist::kChi2One ? 1.0 : 2.0);

  // Threshold grid between the 60th and 99.5th percentile of |deviation|:
  // low enough that survival probabilities stay bounded away from zero, high
  // enough to see the tail decay.
  std::vector<double> abs_dev(deviations.size());
  for (std::size_t i = 0; i < deviations.size(); ++i) {
    abs_dev[i] = std::fabs(deviations[i]);
  }
  std::vector<double> sorted_abs(abs_dev);
  std::sort(sorted_abs.begin(), sorted_abs.end());
  const double t_lo = quantile(sorted_abs, 0.60);
  const double t_hi = quantile(sorted_abs, 0.995);
  const int grid_size = 15;
  report.t_grid.resize(grid_size);
  report.empirical_survival.resize(grid_size);
  double num = 0.0, den = 0.0;
  for (int g = 0; g < grid_size; ++g) {
    const double t = t_lo + (t_hi - t_lo) * g / (grid_size - 1);
    report.t_grid[g] = t;
    const auto it =
        std::lower_bound(sorted_abs.begin(), sorted_abs.end(), t);
    const double survival =
        static_cast<double>(sorted_abs.end() - it) / static_cast<double>(trials);
    report.empirical_survival[g] = survival;
    if (survival > 0.0 && survival < 1.0) {
      // Least squares through the origin: -log S ~= c * n * g(t) with
      // g(t) = t^2 (subgaussian) or min(t, t^2) (subexponential).
      const double x = dist == TailDist::kChi2One
                           ? nd * std::min(t, t * t)
                           : nd * t * t;
      num += -std::log(survival) * x;
      den += x * x;
    }
  }
  report.fitted_c = den > 0.0 ? num / den : 0.0;
  return report;
}

std::string TailFitReport::to_json() const {
  nlohmann::json j;
  j["dist"] = dist;
  j["eps"] = eps;
  j["n"] = n;
  j["trials"] = trials;
  j["t_grid"] = t_grid;
  j["empirical_survival"] = empirical_survival;
  j["fitted_c"] = fitted_c;
  j["family"] = family;
  j["mean_deviation"] = mean_deviation;
  j["n_times_var"] = n_times_var;
  j["orlicz_scaled"] = orlicz_scaled;
  j["warnings"] = warnings;
  return j.dump(2);
}

}  // namespace robust
