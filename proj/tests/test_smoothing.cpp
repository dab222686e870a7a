#include <doctest.h>

#include <cmath>
#include <vector>

#include "robust/distributions.hpp"
#include "robust/errors.hpp"
#include "robust/rng.hpp"
#include "robust/smoothing.hpp"
#include "robust/spd.hpp"

using robust::GaussianModel;
using robust::RngStream;
using robust::sample_gaussian;
using robust::SmoothingDraws;
using robust::SpdMatrix;
using robust::whitened_direction_draws;

namespace {

Eigen::MatrixXd gaussian_rows(Eigen::Index n, Eigen::Index d,
                              std::uint64_t seed) {
  const GaussianModel model(Eigen::VectorXd::Zero(d), SpdMatrix::identity(d));
  RngStream rng(seed, 0);
  return sample_gaussian(model, n, rng).rows;
}

}  // namespace

TEST_CASE("whitened draws come in exact antithetic pairs") {
  const Eigen::MatrixXd rows = gaussian_rows(40, 3, 11);
  const Eigen::MatrixXd g = whitened_direction_draws(rows, 9, RngStream(5, 1));
  REQUIRE(g.cols() == 10);  // odd request rounds up
  for (Eigen::Index p = 0; p < g.cols(); p += 2)
    CHECK((g.col(p) + g.col(p + 1)).norm() == 0.0);
  // The column sum cancels pair by pair; only reduction-order roundoff of
  // the test's own summation remains.
  CHECK(g.rowwise().sum().norm() <= 1e-14 * (1.0 + g.norm()));
}

TEST_CASE("whitened draws are marginally standard normal") {
  const Eigen::MatrixXd rows = gaussian_rows(60, 2, 17);
  const Eigen::MatrixXd g =
      whitened_direction_draws(rows, 40000, RngStream(23, 4));
  const Eigen::MatrixXd cov =
      g * g.transpose() / static_cast<double>(g.cols());
  CHECK((cov - Eigen::MatrixXd::Identity(2, 2)).norm() <= 0.05);
}

TEST_CASE("smoothing offsets realize the gram-proportional law") {
  const Eigen::MatrixXd rows = gaussian_rows(25, 2, 29);
  const double beta = 3.0;
  const SmoothingDraws draws =
      SmoothingDraws::build(rows, beta, 40000, RngStream(31, 6));
  const Eigen::MatrixXd& xi = draws.offsets();
  const Eigen::MatrixXd emp =
      xi * xi.transpose() / static_cast<double>(xi.cols());
  const Eigen::MatrixXd target = rows * rows.transpose() / beta;
  CHECK((emp - target).norm() <= 0.05 * target.norm());
}

TEST_CASE("whitened draws ignore translations of the sample") {
  const Eigen::MatrixXd rows = gaussian_rows(50, 3, 41);
  Eigen::MatrixXd shifted = rows;
  shifted.rowwise() += Eigen::RowVector3d(100.0, -250.0, 7.5);
  const Eigen::MatrixXd a = whitened_direction_draws(rows, 20, RngStream(2, 2));
  const Eigen::MatrixXd b =
      whitened_direction_draws(shifted, 20, RngStream(2, 2));
  CHECK((a - b).norm() <= 1e-9 * (1.0 + a.norm()));
}

TEST_CASE("whitened draws rotate with the sample") {
  const Eigen::MatrixXd rows = gaussian_rows(50, 2, 43);
  const double angle = 0.7;
  Eigen::Matrix2d q;
  q << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  const Eigen::MatrixXd a = whitened_direction_draws(rows, 20, RngStream(3, 3));
  const Eigen::MatrixXd b =
      whitened_direction_draws(rows * q.transpose(), 20, RngStream(3, 3));
  CHECK((b - q * a).norm() <= 1e-9 * (1.0 + a.norm()));
}

TEST_CASE("whitened draws ignore positive rescaling of the sample") {
  const Eigen::MatrixXd rows = gaussian_rows(50, 3, 47);
  const Eigen::MatrixXd a = whitened_direction_draws(rows, 20, RngStream(4, 4));
  const Eigen::MatrixXd b =
      whitened_direction_draws(2.0 * rows, 20, RngStream(4, 4));
  CHECK((a - b).norm() <= 1e-10 * (1.0 + a.norm()));
}

TEST_CASE("degenerate samples yield in-span offsets") {
  // Identical rows: centered gram is zero, so every offset vanishes and the
  // smoothed median collapses to the plain projection.
  Eigen::MatrixXd rows(4, 2);
  rows << 1.5, -2.0, 1.5, -2.0, 1.5, -2.0, 1.5, -2.0;
  const SmoothingDraws draws =
      SmoothingDraws::build(rows, 2.0, 10, RngStream(7, 7));
  CHECK(draws.offsets().norm() == 0.0);

  std::vector<double> scratch(4);
  Eigen::VectorXd v(2);
  v << 0.6, 0.8;
  const double value = smoothed_median_eval(rows, draws, v, scratch);
  CHECK(value == rows.row(0).dot(v));
}

TEST_CASE("antisymmetric three-point samples have exactly zero smoothed median") {
  Eigen::MatrixXd rows(3, 2);
  rows << -1.25, 0.5, 0.0, 0.0, 1.25, -0.5;
  const SmoothingDraws draws =
      SmoothingDraws::build(rows, 2.0, 16, RngStream(9, 9));
  std::vector<double> scratch(3);
  RngStream dir_rng(13, 0);
  for (int rep = 0; rep < 5; ++rep) {
    const Eigen::VectorXd v = robust::unit_direction(2, dir_rng);
    CHECK(robust::smoothed_median_eval(rows, draws, v, scratch) == 0.0);
  }
}

TEST_CASE("smoothing rejects bad arguments") {
  const Eigen::MatrixXd rows = gaussian_rows(10, 2, 53);
  CHECK_THROWS_AS(SmoothingDraws::build(rows, 0.0, 10, RngStream(1, 1)),
                  robust::DomainError);
  CHECK_THROWS_AS(SmoothingDraws::build(rows, 1.0, 0, RngStream(1, 1)),
                  robust::DomainError);
  CHECK_THROWS_AS(
      whitened_direction_draws(Eigen::MatrixXd(0, 2), 4, RngStream(1, 1)),
      robust::InsufficientDataError);
}
