#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "gconvex/box.hpp"

namespace gcx {

enum class KernelKind { Bilinear, NegSquaredDistance, Custom };

std::string_view to_string(KernelKind kind);
KernelKind kernel_kind_from_string(std::string_view name);

/// Surplus kernel Phi : X x Y -> R together with its partial gradients, a
/// Lipschitz bound (lambda) over the boxes and a semiconvexity constant (K)
/// in x.
///
/// Built-in kinds evaluate inline. Custom kernels carry std::function
/// callbacks and are checked against central finite differences when they
/// are registered.
class Kernel {
 public:
  using EvalFn = std::function<double(const Point&, const Point&)>;
  using GradFn = std::function<Point(const Point&, const Point&)>;

  /// Optional structure Phi(x, y) = h(x) + <x, slope(y)> + offset(y) for some
  /// h of x alone (h cancels in transform differences). Kernels that carry
  /// it admit exact conjugation by linear programming.
  struct AffineInX {
    std::function<Point(const Point&)> slope;
    std::function<double(const Point&)> offset;
  };

  struct CustomSpec {
    std::string name;
    EvalFn eval;
    GradFn grad_x;
    GradFn grad_y;
    double lipschitz = 0.0;
    double semiconvexity = 0.0;
    std::optional<AffineInX> affine_in_x;
  };

  // Phi(x, y) = <x, y>.
  static Kernel bilinear(Box x_box, Box y_box);
  // Phi(x, y) = -|x - y|^2.
  static Kernel neg_squared_distance(Box x_box, Box y_box);
  // Throws InputError if the supplied gradients disagree with central finite
  // differences (relative error above 1e-5) at random interior points.
  static Kernel custom(Box x_box, Box y_box, CustomSpec spec, std::uint64_t check_seed = 0x5eed);

  KernelKind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  const Box& x_box() const { return x_box_; }
  const Box& y_box() const { return y_box_; }
  double lipschitz() const { return lipschitz_; }
  double semiconvexity() const { return semiconvexity_; }
  bool is_transposed() const { return transposed_; }

  double eval(const Point& x, const Point& y) const;
  Point grad_x(const Point& x, const Point& y) const;
  Point grad_y(const Point& x, const Point& y) const;

  /// The kernel with arguments swapped: (y, x) -> Phi(x, y). Used when a
  /// conjugate lives on Y and is indexed by points of X. The semiconvexity
  /// constant of the swapped kernel is only known for built-in kinds; for
  /// custom kernels it is reported as +inf.
  Kernel transposed() const;

  /// Present for the built-in kinds and custom kernels that declared it.
  std::optional<AffineInX> affine_in_x() const;

 private:
  Kernel(KernelKind kind, Box x_box, Box y_box);

  double raw_eval(const Point& a, const Point& b) const;
  Point raw_grad_first(const Point& a, const Point& b) const;
  Point raw_grad_second(const Point& a, const Point& b) const;

  KernelKind kind_;
  std::string name_;
  Box x_box_;
  Box y_box_;
  double lipschitz_ = 0.0;
  double semiconvexity_ = 0.0;
  double base_semiconvexity_ = 0.0;
  bool transposed_ = false;
  EvalFn custom_eval_;
  GradFn custom_grad_x_;
  GradFn custom_grad_y_;
  std::optional<AffineInX> custom_affine_;
};

}  // namespace gcx
