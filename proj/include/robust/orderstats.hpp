#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "robust/rng.hpp"

namespace robust {

// 1-based nearest-rank index for the alpha-quantile of n values:
// ceil(alpha * n), with a 1e-9 guard against float roundoff in the product
// and the result clamped to [1, n]. When alpha * n is an integer this is
// exactly the alpha*n-th order statistic; for even n the 1/2-quantile is the
// lower middle value (never a two-point average), so every quantile this
// engine reports is an actual sample point.
std::size_t quantile_rank(std::size_t n, double alpha);

// Nearest-rank empirical quantile; alpha in (0, 1]. Does not modify xs.
double quantile(const std::vector<double>& xs, double alpha);

// Same, but partially reorders xs in place to avoid the copy.
double quantile_inplace(std::vector<double>& xs, double alpha);

// The 1/2-quantile under the convention above.
double median(const std::vector<double>& xs);
double median_inplace(std::vector<double>& xs);

// Empirical Orlicz-norm proxy from moment growth: with m_p the p-th absolute
// moment root (E|x|^p)^(1/p) over p in {2,4,6,8,10}, returns
//   alpha = 2: max_p m_p / sqrt(p)   (sub-gaussian scale)
//   alpha = 1: max_p m_p / p         (sub-exponential scale)
// Requires at least 1000 samples; the top moments are meaningless below
// that. A few thousand samples resolve the proxy to roughly +-15%: it is a
// diagnostic scale, not a precision statistic.
double empirical_orlicz_norm(const std::vector<double>& xs, double alpha);

// Population whose empirical upper-median quantile the concentration lab
// studies.
enum class TailDist { kGaussian, kHalfNormal, kChi2One };

// Outcome of a quantile-concentration experiment: tail of the deviation
// between the empirical (1/2+eps)-quantile and its population value.
struct TailFitReport {
  std::string dist;        // "gaussian" | "half_normal" | "chi2_1"
  double eps = 0.0;
  std::int64_t n = 0;      // observations per trial
  std::int64_t trials = 0;
  std::vector<double> t_grid;              // ascending deviation thresholds
  std::vector<double> empirical_survival;  // P(|deviation| >= t), nonincreasing
  double fitted_c = 0.0;                   // tail-rate coefficient, > 0
  std::string family;      // "subgaussian": exp(-cNt^2); "subexponential": exp(-cN min(t,t^2))
  double mean_deviation = 0.0;
  double n_times_var = 0.0;       // n * Var(deviation)
  double orlicz_scaled = 0.0;     // Orlicz proxy of sqrt(n)-scaled deviations
  std::vector<std::string> warnings;

  std::string to_json() const;
};

// Repeatedly samples n observations, records the deviation of the empirical
// (1/2+eps)-quantile from the population quantile, and fits the deviation
// tail. Deterministic for a fixed stream and independent of the thread
// schedule (per-trial child streams, slot-indexed collection, pairwise
// aggregation). Emits a warning when (1/2 +- eps) * n is not an integer
// (except the canonical odd-n median), since the rank convention then
// decides which order statistic is studied. threads <= 0 resolves via
// ROBUST_THREADS / hardware.
TailFitReport quantile_concentration_experiment(TailDist dist, double eps,
                                                std::int64_t n,
                                                std::int64_t trials,
                                                RngStream rng,
                                                int threads = 0);

}  // namespace robust
