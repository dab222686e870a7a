#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "robust/errors.hpp"
#include "robust/normal.hpp"
#include "robust/orderstats.hpp"
#include "robust/rng.hpp"

using robust::empirical_orlicz_norm;
using robust::median;
using robust::quantile;
using robust::quantile_rank;
using robust::RngStream;
using robust::TailDist;

TEST_CASE("nearest-rank quantile on small explicit cases") {
  // Hand-checked: k = ceil(alpha * n), 1-based, value is the k-th smallest.
  const std::vector<double> xs = {5.0, 1.0, 4.0, 2.0, 3.0};
  CHECK(quantile(xs, 0.5) == 3.0);    // k = ceil(2.5) = 3
  CHECK(quantile(xs, 0.2) == 1.0);    // k = ceil(1.0) = 1
  CHECK(quantile(xs, 0.21) == 2.0);   // k = ceil(1.05) = 2
  CHECK(quantile(xs, 1.0) == 5.0);    // maximum
  CHECK(quantile(xs, 0.75) == 4.0);   // k = ceil(3.75) = 4

  const std::vector<double> even = {4.0, 1.0, 3.0, 2.0};
  CHECK(median(even) == 2.0);  // even n: lower middle, never an average
  CHECK(quantile(even, 0.75) == 3.0);  // k = ceil(3.0) = 3: exact-integer rank

  CHECK_THROWS_AS(quantile(std::vector<double>{}, 0.5),
                  robust::InsufficientDataError);
  CHECK_THROWS_AS(quantile(xs, 0.0), robust::DomainError);
  CHECK_THROWS_AS(quantile(xs, 1.2), robust::DomainError);
}

TEST_CASE("quantile rank resists float roundoff at integer products") {
  CHECK(quantile_rank(3000, 0.05) == 150);   // 0.05*3000 rounds above 150
  CHECK(quantile_rank(10, 0.3) == 3);        // 0.3*10 rounds below 3
  CHECK(quantile_rank(1000, 0.55) == 550);
  CHECK(quantile_rank(1001, 0.5) == 501);    // odd-n median
  CHECK(quantile_rank(1000, 0.5) == 500);    // even-n lower middle
  CHECK(quantile_rank(5, 1.0) == 5);
  CHECK(quantile_rank(5, 1e-9) == 1);
}

TEST_CASE("quantile properties over random inputs") {
  RngStream rng(21, 0);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t n = 1 + rng.next_u64() % 400;
    std::vector<double> xs(n);
    for (auto& x : xs) x = rng.next_normal();
    const double alpha = 0.05 + 0.9 * rng.next_double();
    const double q = quantile(xs, alpha);
    // The quantile is a sample point.
    CHECK(std::count(xs.begin(), xs.end(), q) >= 1);
    // Permutation invariance.
    std::vector<double> shuffled(xs);
    for (std::size_t i = shuffled.size(); i > 1; --i) {
      std::swap(shuffled[i - 1], shuffled[rng.next_u64() % i]);
    }
    CHECK(quantile(shuffled, alpha) == q);
    // Monotone in alpha.
    CHECK(quantile(xs, std::min(1.0, alpha + 0.1)) >= q);
    // Translation equivariance.
    std::vector<double> shifted(xs);
    for (auto& x : shifted) x += 2.5;
    CHECK(quantile(shifted, alpha) == doctest::Approx(q + 2.5));
  }
}

TEST_CASE("orlicz proxy of a constant input") {
  // All absolute moments of a constant C equal |C|, so the proxy is
  // |C|/sqrt(2) at alpha 2 (maximum over p at p = 2) and |C|/2 at alpha 1.
  std::vector<double> xs(2000, -3.0);
  CHECK(empirical_orlicz_norm(xs, 2.0) ==
        doctest::Approx(3.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(empirical_orlicz_norm(xs, 1.0) == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("orlicz proxy scaling and domain") {
  RngStream rng(31, 0);
  std::vector<double> xs(5000);
  for (auto& x : xs) x = rng.next_normal();
  const double base = empirical_orlicz_norm(xs, 2.0);
  // Standard normal proxy lands near 1/sqrt(2) (the p = 2 term dominates).
  CHECK(base > 0.6);
  CHECK(base < 1.1);
  // Positive homogeneity.
  std::vector<double> scaled(xs);
  for (auto& x : scaled) x *= 7.0;
  CHECK(empirical_orlicz_norm(scaled, 2.0) ==
        doctest::Approx(7.0 * base).epsilon(1e-9));

  std::vector<double> few(100, 1.0);
  CHECK_THROWS_AS(empirical_orlicz_norm(few, 2.0),
                  robust::InsufficientDataError);
  CHECK_THROWS_AS(empirical_orlicz_norm(xs, 1.5), robust::DomainError);
}

TEST_CASE("concentration experiment smoke run (gaussian median, n=101)") {
  RngStream rng(55, 0);
  auto report = robust::quantile_concentration_experiment(
      TailDist::kGaussian, 0.0, 101, 2000, rng, 1);
  CHECK(report.family == "subgaussian");
  CHECK(report.dist == "gaussian");
  CHECK(report.warnings.empty());  // odd-n median is the canonical case
  // Median of n standard normals: n * Var -> pi/2 as n grows; generous
  // bracket at n = 101.
  CHECK(report.n_times_var > 1.2);
  CHECK(report.n_times_var < 2.1);
  CHECK(std::fabs(report.mean_deviation) < 0.05);
  CHECK(report.fitted_c > 0.0);
  REQUIRE(report.t_grid.size() == 15);
  REQUIRE(report.empirical_survival.size() == 15);
  for (std::size_t i = 1; i < report.t_grid.size(); ++i) {
    CHECK(report.t_grid[i] > report.t_grid[i - 1]);
    CHECK(report.empirical_survival[i] <= report.empirical_survival[i - 1]);
  }
  // Scaled proxy is O(1) for the gaussian median.
  CHECK(report.orlicz_scaled < 3.0);
  CHECK(report.orlicz_scaled > 0.3);
  // JSON serialization carries the named fields.
  const std::string js = report.to_json();
  CHECK(js.find("\"fitted_c\"") != std::string::npos);
  CHECK(js.find("\"empirical_survival\"") != std::string::npos);
  CHECK(js.find("\"family\"") != std::string::npos);
  CHECK(js.find("\"t_grid\"") != std::string::npos);
}

TEST_CASE("concentration experiment is thread-schedule independent") {
  RngStream rng(66, 0);
  auto r1 = robust::quantile_concentration_experiment(TailDist::kChi2One, 0.1,
                                                      100, 1000, rng, 1);
  auto r4 = robust::quantile_concentration_experiment(TailDist::kChi2One, 0.1,
                                                      100, 1000, rng, 4);
  CHECK(r1.family == "subexponential");
  CHECK(r1.n_times_var == r4.n_times_var);
  CHECK(r1.fitted_c == r4.fitted_c);
  CHECK(r1.orlicz_scaled == r4.orlicz_scaled);
  REQUIRE(r1.t_grid.size() == r4.t_grid.size());
  for (std::size_t i = 0; i < r1.t_grid.size(); ++i) {
    CHECK(r1.t_grid[i] == r4.t_grid[i]);
    CHECK(r1.empirical_survival[i] == r4.empirical_survival[i]);
  }
  // (1/2 +- eps) * n = 60/40 are integers here: no warning.
  CHECK(r1.warnings.empty());
  // Non-integral case warns.
  RngStream rng2(67, 0);
  auto rw = robust::quantile_concentration_experiment(TailDist::kGaussian, 0.13,
                                                      101, 1000, rng2, 1);
  CHECK(rw.warnings.size() == 1);
}

TEST_CASE("concentration experiment rejects undersized inputs") {
  RngStream rng(1, 1);
  CHECK_THROWS_AS(robust::quantile_concentration_experiment(
                      TailDist::kGaussian, 0.0, 101, 10, rng, 1),
                  robust::InsufficientDataError);
  CHECK_THROWS_AS(robust::quantile_concentration_experiment(
                      TailDist::kGaussian, 0.6, 101, 2000, rng, 1),
                  robust::DomainError);
}
