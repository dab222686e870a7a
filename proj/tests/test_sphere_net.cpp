#include <doctest.h>

#include <cmath>

#include "robust/errors.hpp"
#include "robust/sphere_net.hpp"

using robust::build_sphere_net;
using robust::net_covering_angle;
using robust::RngStream;
using robust::SphereNet;

namespace {
constexpr double kPi = 3.14159265358979323846;

void check_unit_and_negation_closed(const SphereNet& net) {
  for (Eigen::Index i = 0; i < net.size(); ++i)
    CHECK(std::fabs(net.directions.row(i).norm() - 1.0) <= 1e-12);
  // Closure must be exact: the builder appends literal negations.
  const Eigen::Index half = net.size() / 2;
  REQUIRE(net.size() % 2 == 0);
  for (Eigen::Index i = 0; i < half; ++i)
    CHECK((net.directions.row(half + i) + net.directions.row(i)).norm() == 0.0);
}
}  // namespace

TEST_CASE("one-dimensional net is exactly the two signs") {
  for (double res : {1.0, 0.5, 0.01}) {
    const SphereNet net = build_sphere_net(1, res, RngStream(1, 0));
    REQUIRE(net.size() == 2);
    CHECK(net.directions(0, 0) == 1.0);
    CHECK(net.directions(1, 0) == -1.0);
  }
}

TEST_CASE("two-dimensional net is the equiangular grid") {
  const SphereNet net = build_sphere_net(2, kPi / 180.0, RngStream(1, 0));
  REQUIRE(net.size() == 360);
  check_unit_and_negation_closed(net);
  CHECK(net.directions(0, 0) == 1.0);
  CHECK(net.directions(0, 1) == 0.0);
  // Consecutive angular gap is one degree, within roundoff, throughout the
  // first half (the second half is the mirrored copy).
  for (Eigen::Index i = 0; i + 1 < 180; ++i) {
    const double dot = net.directions.row(i).dot(net.directions.row(i + 1));
    CHECK(std::fabs(std::acos(std::min(1.0, dot)) - kPi / 180.0) <= 1e-9);
  }
}

TEST_CASE("two-dimensional net rounds odd direction counts up to even") {
  // ceil(2*pi / 0.91) = 7, which must be bumped to 8 for exact closure.
  const SphereNet net = build_sphere_net(2, 0.91, RngStream(1, 0));
  CHECK(net.size() == 8);
  check_unit_and_negation_closed(net);
}

TEST_CASE("three-dimensional net covers the sphere at its resolution") {
  const SphereNet net = build_sphere_net(3, 0.3, RngStream(42, 7));
  CHECK(net.size() >= 100);
  check_unit_and_negation_closed(net);
  CHECK(net_covering_angle(net, 100, RngStream(99, 1)) <= 0.6);
}

TEST_CASE("net construction is deterministic in the stream") {
  const SphereNet a = build_sphere_net(4, 0.5, RngStream(5, 3));
  const SphereNet b = build_sphere_net(4, 0.5, RngStream(5, 3));
  CHECK(a.directions == b.directions);
}

TEST_CASE("net builder rejects bad arguments") {
  CHECK_THROWS_AS(build_sphere_net(0, 0.5, RngStream(1, 0)),
                  robust::DomainError);
  CHECK_THROWS_AS(build_sphere_net(2, 0.0, RngStream(1, 0)),
                  robust::DomainError);
  CHECK_THROWS_AS(build_sphere_net(2, 1.5, RngStream(1, 0)),
                  robust::DomainError);
  CHECK_THROWS_AS(build_sphere_net(3, 0.004, RngStream(1, 0)),
                  robust::NetTooLargeError);
  // The d = 2 grid also honors the cap.
  CHECK_THROWS_AS(build_sphere_net(2, 0.001, RngStream(1, 0), 1000),
                  robust::NetTooLargeError);
}
