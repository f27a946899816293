#include "gconvex/measure.hpp"

#include <cmath>
#include <string>

#include "gconvex/errors.hpp"

namespace gcx {

SampleMeasure::SampleMeasure(Eigen::MatrixXd points, Eigen::VectorXd weights)
    : points_(std::move(points)), weights_(std::move(weights)) {
  if (points_.rows() == 0 || points_.cols() == 0) throw InputError("SampleMeasure: no points");
  if (weights_.size() != points_.rows()) {
    throw InputError("SampleMeasure: " + std::to_string(points_.rows()) + " points but " +
                     std::to_string(weights_.size()) + " weights");
  }
  long double total = 0.0L;
  for (Eigen::Index k = 0; k < weights_.size(); ++k) {
    if (!(weights_[k] >= 0.0) || !std::isfinite(weights_[k])) {
      throw InputError("SampleMeasure: weight " + std::to_string(k) + " is negative or not finite");
    }
    total += weights_[k];
  }
  if (std::abs(static_cast<double>(total - 1.0L)) > 1e-12) {
    throw InputError("SampleMeasure: weights sum to " + std::to_string(static_cast<double>(total)) +
                     ", expected 1");
  }
  if (!points_.allFinite()) throw InputError("SampleMeasure: points must be finite");
}

SampleMeasure SampleMeasure::uniform(Eigen::MatrixXd points) {
  const auto k = points.rows();
  if (k == 0) throw InputError("SampleMeasure: no points");
  return SampleMeasure(std::move(points), Eigen::VectorXd::Constant(k, 1.0 / static_cast<double>(k)));
}

SampleMeasure SampleMeasure::uniform(const PointSet& points) {
  if (points.empty()) throw InputError("SampleMeasure: no points");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(points.size()), points.front().size());
  for (std::size_t k = 0; k < points.size(); ++k) {
    if (points[k].size() != m.cols()) throw InputError("SampleMeasure: points differ in dimension");
    m.row(static_cast<Eigen::Index>(k)) = points[k].transpose();
  }
  return uniform(std::move(m));
}

SampleMeasure SampleMeasure::draw_uniform(const Box& box, std::size_t count, Rng& rng) {
  if (count == 0) throw InputError("SampleMeasure: count must be positive");
  const auto n = static_cast<Eigen::Index>(box.dim());
  Eigen::MatrixXd m(static_cast<Eigen::Index>(count), n);
  for (Eigen::Index k = 0; k < m.rows(); ++k) {
    for (Eigen::Index i = 0; i < n; ++i) m(k, i) = rng.uniform(box.lower()[i], box.upper()[i]);
  }
  return uniform(std::move(m));
}

PointSet SampleMeasure::point_set() const {
  PointSet out;
  out.reserve(size());
  for (std::size_t k = 0; k < size(); ++k) out.push_back(point(k));
  return out;
}

}  // namespace gcx
