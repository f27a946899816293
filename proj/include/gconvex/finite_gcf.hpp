#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "gconvex/box.hpp"
#include "gconvex/kernel.hpp"

namespace gcx {

/// LSE smoothing temperature; always strictly positive.
class Temperature {
 public:
  explicit Temperature(double tau);
  double tau() const { return tau_; }

 private:
  double tau_;
};

/// A finitely Y-convex function f(x) = max_i { Phi(x, y_i) - r_i } on the
/// kernel's X box, with support y_1..y_m in the kernel's Y box.
///
/// Potentials may be +inf, which removes the entry from the max (the
/// support-enlarging construction); at least one potential must be finite.
/// Values are immutable once constructed.
class FiniteGCF {
 public:
  FiniteGCF(Kernel kernel, PointSet support, Eigen::VectorXd potentials);

  const Kernel& kernel() const { return kernel_; }
  const Box& domain() const { return kernel_.x_box(); }
  const Box& support_box() const { return kernel_.y_box(); }
  const PointSet& support() const { return support_; }
  const Eigen::VectorXd& potentials() const { return potentials_; }
  std::size_t size() const { return support_.size(); }
  std::size_t dim() const { return domain().dim(); }

  /// Same support and kernel, new potentials.
  FiniteGCF with_potentials(Eigen::VectorXd potentials) const;

 private:
  Kernel kernel_;
  PointSet support_;
  Eigen::VectorXd potentials_;
};

/// Winning support index at a point; `margin` is the gap between the best
/// and the second best inner value (+inf when m == 1).
struct ActiveEntry {
  std::size_t index = 0;
  double value = 0.0;
  double margin = 0.0;
};

// Phi(x, y_i) - r_i for every i.
Eigen::VectorXd inner_values(const FiniteGCF& f, const Point& x);
// Argmax with lowest-index tie breaking.
ActiveEntry active_entry(const FiniteGCF& f, const Point& x);

double gcf_eval(const FiniteGCF& f, const Point& x);
/// (1/tau) ln sum_i exp(tau (Phi(x, y_i) - r_i)), max-shifted.
double gcf_eval_smooth(const FiniteGCF& f, const Point& x, Temperature t);
/// grad_x Phi(x, y_{i*}) at the lowest-index argmax i*.
Point gcf_grad(const FiniteGCF& f, const Point& x);
/// Softmax-weighted average of grad_x Phi(x, y_i).
Point gcf_grad_smooth(const FiniteGCF& f, const Point& x, Temperature t);
/// Softmax weights of tau * inner values.
Eigen::VectorXd softmax_weights(const Eigen::VectorXd& values, Temperature t);

/// The grid conjugate g(y) = max_j { Phi(x_j, y) - f(x_j) }: a FiniteGCF on
/// the Y box whose support is the grid and whose kernel is the transpose.
/// Replacing the supremum over X by a grid of spacing h costs at most
/// lipschitz * h * sqrt(n) relative to the exact conjugate.
FiniteGCF conjugate_on_grid(const FiniteGCF& f, const PointSet& grid);

/// r -> (r^{grid, support}) restricted to the support. The result represents
/// the same values as f at every grid point and has r' <= r.
FiniteGCF lean_project(const FiniteGCF& f, const PointSet& grid);

struct LeanReport {
  bool lean = false;
  // witness[i]: a grid point where entry i attains the max (within tol).
  std::vector<std::optional<Point>> witness;
};

/// Grid-relative leanness: every support entry attains the max, up to tol,
/// at some grid point.
LeanReport is_lean(const FiniteGCF& f, const PointSet& grid, double tol);

}  // namespace gcx
