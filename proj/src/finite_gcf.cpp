#include "gconvex/finite_gcf.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "gconvex/errors.hpp"

namespace gcx {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_point(const FiniteGCF& f, const Point& x) {
  if (static_cast<std::size_t>(x.size()) != f.dim()) {
    throw InputError("point has dimension " + std::to_string(x.size()) + ", expected " +
                     std::to_string(f.dim()));
  }
}

void check_grid(const FiniteGCF& f, const PointSet& grid, const char* who) {
  if (grid.empty()) throw InputError(std::string(who) + ": grid is empty");
  for (const auto& x : grid) {
    check_point(f, x);
    if (!f.domain().contains(x, 1e-12)) {
      throw InputError(std::string(who) + ": grid point outside the domain box");
    }
  }
}

}  // namespace

Temperature::Temperature(double tau) : tau_(tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw InputError("temperature must be positive and finite");
  }
}

FiniteGCF::FiniteGCF(Kernel kernel, PointSet support, Eigen::VectorXd potentials)
    : kernel_(std::move(kernel)), support_(std::move(support)), potentials_(std::move(potentials)) {
  if (support_.empty()) throw InputError("FiniteGCF: support must be nonempty");
  if (static_cast<std::size_t>(potentials_.size()) != support_.size()) {
    throw InputError("FiniteGCF: " + std::to_string(support_.size()) + " support points but " +
                     std::to_string(potentials_.size()) + " potentials");
  }
  bool any_finite = false;
  for (std::size_t i = 0; i < support_.size(); ++i) {
    if (static_cast<std::size_t>(support_[i].size()) != support_box().dim()) {
      throw InputError("FiniteGCF: support point " + std::to_string(i) + " has wrong dimension");
    }
    if (!support_box().contains(support_[i], 1e-12)) {
      throw InputError("FiniteGCF: support point " + std::to_string(i) + " outside its box");
    }
    const double r = potentials_[static_cast<Eigen::Index>(i)];
    if (std::isnan(r) || r == -kInf) {
      throw InputError("FiniteGCF: potential " + std::to_string(i) + " is NaN or -inf");
    }
    any_finite = any_finite || std::isfinite(r);
  }
  if (!any_finite) throw InputError("FiniteGCF: at least one potential must be finite");
}

FiniteGCF FiniteGCF::with_potentials(Eigen::VectorXd potentials) const {
  return FiniteGCF(kernel_, support_, std::move(potentials));
}

Eigen::VectorXd inner_values(const FiniteGCF& f, const Point& x) {
  check_point(f, x);
  const auto m = static_cast<Eigen::Index>(f.size());
  Eigen::VectorXd v(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    v[i] = f.kernel().eval(x, f.support()[static_cast<std::size_t>(i)]) - f.potentials()[i];
  }
  return v;
}

namespace {

ActiveEntry argmax_of(const Eigen::VectorXd& v) {
  ActiveEntry best{0, v[0], kInf};
  double second = -kInf;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (v[i] > best.value) {
      second = best.value;
      best.index = static_cast<std::size_t>(i);
      best.value = v[i];
    } else if (v[i] > second) {
      second = v[i];
    }
  }
  best.margin = best.value - second;
  return best;
}

}  // namespace

ActiveEntry active_entry(const FiniteGCF& f, const Point& x) {
  return argmax_of(inner_values(f, x));
}

double gcf_eval(const FiniteGCF& f, const Point& x) { return active_entry(f, x).value; }

Eigen::VectorXd softmax_weights(const Eigen::VectorXd& values, Temperature t) {
  const double top = values.maxCoeff();
  Eigen::VectorXd w = (t.tau() * (values.array() - top)).exp().matrix();
  return w / w.sum();
}

double gcf_eval_smooth(const FiniteGCF& f, const Point& x, Temperature t) {
  const Eigen::VectorXd v = inner_values(f, x);
  const double top = v.maxCoeff();
  const double s = (t.tau() * (v.array() - top)).exp().sum();
  return top + std::log(s) / t.tau();
}

Point gcf_grad(const FiniteGCF& f, const Point& x) {
  const ActiveEntry a = active_entry(f, x);
  return f.kernel().grad_x(x, f.support()[a.index]);
}

Point gcf_grad_smooth(const FiniteGCF& f, const Point& x, Temperature t) {
  const Eigen::VectorXd w = softmax_weights(inner_values(f, x), t);
  Point g = Point::Zero(x.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double wi = w[static_cast<Eigen::Index>(i)];
    if (wi > 0.0) g += wi * f.kernel().grad_x(x, f.support()[i]);
  }
  return g;
}

FiniteGCF conjugate_on_grid(const FiniteGCF& f, const PointSet& grid) {
  check_grid(f, grid, "conjugate_on_grid");
  Eigen::VectorXd q(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t j = 0; j < grid.size(); ++j) q[static_cast<Eigen::Index>(j)] = gcf_eval(f, grid[j]);
  return FiniteGCF(f.kernel().transposed(), grid, std::move(q));
}

FiniteGCF lean_project(const FiniteGCF& f, const PointSet& grid) {
  const FiniteGCF g = conjugate_on_grid(f, grid);
  Eigen::VectorXd r(static_cast<Eigen::Index>(f.size()));
  for (std::size_t i = 0; i < f.size(); ++i) r[static_cast<Eigen::Index>(i)] = gcf_eval(g, f.support()[i]);
  return f.with_potentials(std::move(r));
}

LeanReport is_lean(const FiniteGCF& f, const PointSet& grid, double tol) {
  check_grid(f, grid, "is_lean");
  if (!(tol >= 0.0)) throw InputError("is_lean: tolerance must be nonnegative");
  LeanReport report;
  report.witness.assign(f.size(), std::nullopt);
  std::size_t found = 0;
  for (const auto& x : grid) {
    const Eigen::VectorXd v = inner_values(f, x);
    const double top = v.maxCoeff();
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (!report.witness[i] && v[static_cast<Eigen::Index>(i)] >= top - tol) {
        report.witness[i] = x;
        ++found;
      }
    }
    if (found == f.size()) break;
  }
  report.lean = found == f.size();
  return report;
}

}  // namespace gcx
