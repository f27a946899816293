#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <vector>

namespace gcx {

using Point = Eigen::VectorXd;
using PointSet = std::vector<Point>;

/// Axis-aligned compact box [lower, upper] in R^dim.
class Box {
 public:
  Box(Point lower, Point upper);

  static Box unit(std::size_t dim);

  std::size_t dim() const { return static_cast<std::size_t>(lower_.size()); }
  const Point& lower() const { return lower_; }
  const Point& upper() const { return upper_; }

  bool contains(const Point& x, double tol = 0.0) const;
  Point midpoint() const { return 0.5 * (lower_ + upper_); }
  double diameter() const { return (upper_ - lower_).norm(); }
  // Largest Euclidean norm of any point in the box.
  double max_norm() const;

  bool operator==(const Box& other) const = default;

 private:
  Point lower_;
  Point upper_;
};

/// Regular lattice with `per_axis` points per coordinate, endpoints included
/// (a single point per axis sits at the midpoint). Row-major ordering with
/// the last coordinate varying fastest.
PointSet lattice(const Box& box, std::size_t per_axis);

}  // namespace gcx
