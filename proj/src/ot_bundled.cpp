#include "gconvex/ot_dual.hpp"
#include "gconvex/rng.hpp"

namespace gcx::ot {

namespace {

constexpr long kUnits = 12;

// kUnits split into `parts` positive integers, normalised.
Eigen::VectorXd random_masses(std::size_t parts, Rng& rng) {
  std::vector<long> mass(parts, 1);
  for (long left = kUnits - static_cast<long>(parts); left > 0; --left) ++mass[rng.below(parts)];
  Eigen::VectorXd w(static_cast<Eigen::Index>(parts));
  for (std::size_t i = 0; i < parts; ++i) w[static_cast<Eigen::Index>(i)] = static_cast<double>(mass[i]) / kUnits;
  return w;
}

Eigen::MatrixXd random_points(std::size_t count, std::size_t dim, Rng& rng) {
  Eigen::MatrixXd p(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(dim));
  for (Eigen::Index r = 0; r < p.rows(); ++r) {
    for (Eigen::Index c = 0; c < p.cols(); ++c) p(r, c) = rng.uniform01();
  }
  return p;
}

}  // namespace

std::vector<Instance> bundled_instances() {
  std::vector<Instance> out;
  for (std::size_t t = 0; t < 10; ++t) {
    Rng rng(1000 + t);
    const std::size_t dim = 1 + t % 3;
    const std::size_t k = 2 + rng.below(5);
    const std::size_t m = 2 + rng.below(5);
    SampleMeasure mu(random_points(k, dim, rng), random_masses(k, rng));
    SampleMeasure eta(random_points(m, dim, rng), random_masses(m, rng));
    out.push_back(Instance{std::move(mu), std::move(eta), Kernel::bilinear(Box::unit(dim), Box::unit(dim))});
  }
  return out;
}

}  // namespace gcx::ot
