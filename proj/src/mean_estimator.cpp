#include "robust/mean_estimator.hpp"

#include <chrono>
#include <cmath>
#include <vector>

#include "robust/chebyshev.hpp"
#include "robust/errors.hpp"
#include "robust/normal.hpp"
#include "robust/orderstats.hpp"
#include "robust/parallel.hpp"
#include "robust/smoothing.hpp"
#include "robust/tuning.hpp"

namespace robust {

namespace {

// Stage index for deriving the smoothing-draw stream from the config seed.
constexpr std::uint64_t kSmoothingStage = 1;
// Fixed seeds for the internal nets (default estimation net, tuner net), so
// both are pure functions of the dimension.
constexpr std::uint64_t kDefaultNetSeed = 0xD1A5C0DE;
constexpr std::uint64_t kTunerNetSeed = 0xB37A0001;

double resolution_for_target(Eigen::Index d, double target_size) {
  // Invert target = (3 / res)^(d-1); clamp into the legal (0, 1] range.
  const double res = 3.0 / std::pow(target_size, 1.0 / static_cast<double>(d - 1));
  return std::min(1.0, res);
}

SphereNet tuner_net(Eigen::Index d) {
  if (d == 1) return build_sphere_net(1, 1.0, RngStream(kTunerNetSeed, 0));
  if (d == 2)
    return build_sphere_net(2, 3.14159265358979323846 / 90.0,
                            RngStream(kTunerNetSeed, 0));
  return build_sphere_net(d, resolution_for_target(d, 360.0),
                          RngStream(kTunerNetSeed, 0));
}

void validate_eps_delta(double eps, double delta) {
  if (!(eps >= 0.0) || !(eps < 0.25))
    throw DomainError("contamination level must lie in [0, 0.25)");
  if (!(delta > 0.0) || !(delta < 1.0))
    throw DomainError("failure probability must lie in (0, 1)");
}

SmoothMedConfig validated_config(const Sample& sample,
                                 const SmoothMedConfig& cfg) {
  if (cfg.beta < 1) throw DomainError("smoothing beta must be >= 1");
  if (cfg.mc_draws < 1) throw DomainError("need at least one MC draw");
  if (cfg.net.size() < 2) throw DomainError("net must hold at least 2 directions");
  if (cfg.net.dim() != sample.dim())
    throw DomainError("net dimension does not match sample");
  return cfg;
}

}  // namespace

SphereNet default_mean_net(Eigen::Index d) {
  if (d == 1) return build_sphere_net(1, 1.0, RngStream(kDefaultNetSeed, 0));
  if (d == 2)
    return build_sphere_net(2, 3.14159265358979323846 / 180.0,
                            RngStream(kDefaultNetSeed, 0));
  return build_sphere_net(d, resolution_for_target(d, 2000.0),
                          RngStream(kDefaultNetSeed, 0));
}

double smooth_med(const Sample& sample, const Eigen::VectorXd& v,
                  const SmoothMedConfig& cfg) {
  if (sample.size() < 1) throw InsufficientDataError("empty sample");
  if (v.size() != sample.dim())
    throw DomainError("direction dimension does not match sample");
  if (std::fabs(v.norm() - 1.0) > 1e-6)
    throw DomainError("direction must be unit length");
  if (cfg.beta < 1) throw DomainError("smoothing beta must be >= 1");
  if (cfg.mc_draws < 1) throw DomainError("need at least one MC draw");

  const SmoothingDraws draws =
      SmoothingDraws::build(sample.rows, static_cast<double>(cfg.beta),
                            cfg.mc_draws, cfg.seed.child(kSmoothingStage));
  std::vector<double> scratch(static_cast<std::size_t>(sample.size()));
  return smoothed_median_eval(sample.rows, draws, v, scratch);
}

int tune_beta_mean(const Sample& sample, double eps, double delta) {
  validate_eps_delta(eps, delta);
  if (sample.size() < 20) throw InsufficientDataError("need at least 20 rows");

  // Coordinatewise MAD-based trace proxy.
  const Eigen::Index n = sample.size();
  const Eigen::Index d = sample.dim();
  std::vector<double> coord(static_cast<std::size_t>(n));
  double tau = 0.0;
  bool any_spread = false;
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index i = 0; i < n; ++i)
      coord[static_cast<std::size_t>(i)] = sample.rows(i, j);
    const double med = median_inplace(coord);
    for (double& c : coord) c = std::fabs(c - med);
    const double mad = median_inplace(coord);
    if (mad > 0.0) any_spread = true;
    const double scale = mad / kNormalUpperQuartile;
    tau += scale * scale;
  }
  if (!any_spread)
    throw RankDegenerateError("every coordinate has zero MAD");

  const double omega = robust_opnorm(sample, tuner_net(d));
  if (!(omega > 0.0))
    throw RankDegenerateError("every tuner-net projection has zero MAD");

  const long long beta = std::llround(tau / omega);
  return static_cast<int>(std::max(1ll, beta));
}

EstimatorReport estimate_mean(const Sample& contaminated, double eps,
                              double delta,
                              const std::optional<SmoothMedConfig>& overrides) {
  const auto start = std::chrono::steady_clock::now();
  validate_eps_delta(eps, delta);
  if (contaminated.size() < 1) throw InsufficientDataError("empty sample");

  SmoothMedConfig cfg;
  if (overrides) {
    cfg = validated_config(contaminated, *overrides);
  } else {
    cfg.beta = tune_beta_mean(contaminated, eps, delta);
    cfg.mc_draws = 200;
    cfg.net = default_mean_net(contaminated.dim());
    cfg.seed = RngStream(0, 0);
  }

  const SmoothingDraws draws = SmoothingDraws::build(
      contaminated.rows, static_cast<double>(cfg.beta), cfg.mc_draws,
      cfg.seed.child(kSmoothingStage));

  const Eigen::Index k = cfg.net.size();
  std::vector<double> values(static_cast<std::size_t>(k));
  parallel_for(k, resolve_threads(0), [&](std::int64_t i) {
    std::vector<double> scratch(static_cast<std::size_t>(contaminated.size()));
    values[static_cast<std::size_t>(i)] = smoothed_median_eval(
        contaminated.rows, draws, cfg.net.directions.row(i).transpose(),
        scratch);
  });

  const ChebyshevResult cheb = chebyshev_center(cfg.net, values);

  EstimatorReport report;
  report.estimate_vector = cheb.center;
  report.objective = cheb.objective;
  report.iterations = cheb.iterations;
  report.mc_draws = draws.draws();
  report.seed = cfg.seed.seed();
  report.stream = cfg.seed.stream_id();
  report.beta = static_cast<double>(cfg.beta);
  report.per_direction = values;
  report.runtime_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                start)
          .count();
  return report;
}

}  // namespace robust
