#include "robust/sphere_net.hpp"

#include <cmath>
#include <string>

#include "robust/distributions.hpp"
#include "robust/errors.hpp"

namespace robust {

namespace {

constexpr double kPi = 3.14159265358979323846;

Eigen::MatrixXd symmetrized_uniform(Eigen::Index d, Eigen::Index half,
                                    RngStream& rng) {
  Eigen::MatrixXd dirs(2 * half, d);
  for (Eigen::Index i = 0; i < half; ++i) {
    const Eigen::VectorXd v = unit_direction(d, rng);
    dirs.row(i) = v.transpose();
    dirs.row(half + i) = -v.transpose();
  }
  return dirs;
}

}  // namespace

SphereNet build_sphere_net(Eigen::Index d, double resolution, RngStream rng,
                           Eigen::Index max_size) {
  if (d < 1) throw DomainError("sphere net dimension must be positive");
  if (!(resolution > 0.0) || !(resolution <= 1.0))
    throw DomainError("sphere net resolution must lie in (0, 1]");

  SphereNet net;
  net.resolution = resolution;

  if (d == 1) {
    net.directions.resize(2, 1);
    net.directions(0, 0) = 1.0;
    net.directions(1, 0) = -1.0;
    return net;
  }

  if (d == 2) {
    Eigen::Index k = static_cast<Eigen::Index>(std::ceil(2.0 * kPi / resolution));
    if (k < 2) k = 2;
    if (k % 2 != 0) ++k;
    if (k > max_size)
      throw NetTooLargeError("sphere net would need " + std::to_string(k) +
                             " directions (limit " + std::to_string(max_size) +
                             "); use a coarser resolution");
    // First half from angles, second half as exact negations so negation
    // closure holds bitwise.
    net.directions.resize(k, 2);
    const Eigen::Index half = k / 2;
    for (Eigen::Index i = 0; i < half; ++i) {
      const double angle = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(k);
      net.directions(i, 0) = std::cos(angle);
      net.directions(i, 1) = std::sin(angle);
      net.directions(half + i, 0) = -net.directions(i, 0);
      net.directions(half + i, 1) = -net.directions(i, 1);
    }
    return net;
  }

  const double target = std::ceil(std::pow(3.0 / resolution,
                                           static_cast<double>(d - 1)));
  if (!(target <= static_cast<double>(max_size)))
    throw NetTooLargeError("sphere net would need about " +
                           std::to_string(target) + " directions (limit " +
                           std::to_string(max_size) +
                           "); use a coarser resolution");
  const Eigen::Index count = static_cast<Eigen::Index>(target);
  const Eigen::Index half = (count + 1) / 2;
  net.directions = symmetrized_uniform(d, half, rng);
  return net;
}

double net_covering_angle(const SphereNet& net, int probes, RngStream rng) {
  if (net.size() == 0) throw DomainError("empty sphere net");
  if (probes < 1) throw DomainError("need at least one probe");
  double worst = 0.0;
  for (int p = 0; p < probes; ++p) {
    const Eigen::VectorXd v = unit_direction(net.dim(), rng);
    const double best_dot = (net.directions * v).maxCoeff();
    const double clamped = std::min(1.0, std::max(-1.0, best_dot));
    worst = std::max(worst, std::acos(clamped));
  }
  return worst;
}

}  // namespace robust
