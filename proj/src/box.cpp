#include "gconvex/box.hpp"

#include <algorithm>
#include <cmath>

#include "gconvex/errors.hpp"

namespace gcx {

Box::Box(Point lower, Point upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() == 0 || lower_.size() != upper_.size()) {
    throw InputError("Box: bound vectors must be nonempty and of equal length");
  }
  for (Eigen::Index i = 0; i < lower_.size(); ++i) {
    if (!std::isfinite(lower_[i]) || !std::isfinite(upper_[i]) || lower_[i] > upper_[i]) {
      throw InputError("Box: require finite lower[i] <= upper[i] at index " + std::to_string(i));
    }
  }
}

Box Box::unit(std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  return Box(Point::Zero(n), Point::Ones(n));
}

bool Box::contains(const Point& x, double tol) const {
  if (x.size() != lower_.size()) return false;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!(x[i] >= lower_[i] - tol && x[i] <= upper_[i] + tol)) return false;
  }
  return true;
}

double Box::max_norm() const {
  double s = 0.0;
  for (Eigen::Index i = 0; i < lower_.size(); ++i) {
    const double c = std::max(std::abs(lower_[i]), std::abs(upper_[i]));
    s += c * c;
  }
  return std::sqrt(s);
}

PointSet lattice(const Box& box, std::size_t per_axis) {
  if (per_axis == 0) throw InputError("lattice: per_axis must be positive");
  const std::size_t n = box.dim();
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= per_axis;

  PointSet out;
  out.reserve(total);
  std::vector<std::size_t> idx(n, 0);
  for (std::size_t c = 0; c < total; ++c) {
    Point p(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      const double lo = box.lower()[ii];
      const double hi = box.upper()[ii];
      if (per_axis == 1) {
        p[ii] = 0.5 * (lo + hi);
      } else if (idx[i] + 1 == per_axis) {
        p[ii] = hi;
      } else {
        p[ii] = lo + (hi - lo) * static_cast<double>(idx[i]) / static_cast<double>(per_axis - 1);
      }
    }
    out.push_back(std::move(p));
    for (std::size_t i = n; i-- > 0;) {
      if (++idx[i] < per_axis) break;
      idx[i] = 0;
    }
  }
  return out;
}

}  // namespace gcx
