#pragma once

#include <cstddef>

#include <Eigen/Core>

#include "gconvex/box.hpp"
#include "gconvex/rng.hpp"

namespace gcx {

/// Weighted point set: rows of `points` are the atoms.
class SampleMeasure {
 public:
  // Weights must be nonnegative and sum to 1 within 1e-12.
  SampleMeasure(Eigen::MatrixXd points, Eigen::VectorXd weights);

  static SampleMeasure uniform(Eigen::MatrixXd points);
  static SampleMeasure uniform(const PointSet& points);
  /// `count` i.i.d. draws from the uniform distribution on `box`.
  static SampleMeasure draw_uniform(const Box& box, std::size_t count, Rng& rng);

  std::size_t size() const { return static_cast<std::size_t>(points_.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(points_.cols()); }
  const Eigen::MatrixXd& points() const { return points_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  Point point(std::size_t k) const { return points_.row(static_cast<Eigen::Index>(k)).transpose(); }
  PointSet point_set() const;

 private:
  Eigen::MatrixXd points_;
  Eigen::VectorXd weights_;
};

}  // namespace gcx
