#include "gconvex/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gconvex/errors.hpp"
#include "gconvex/rng.hpp"

namespace gcx {

std::string_view to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::Bilinear:
      return "bilinear";
    case KernelKind::NegSquaredDistance:
      return "neg_squared_distance";
    case KernelKind::Custom:
      return "custom";
  }
  return "custom";
}

KernelKind kernel_kind_from_string(std::string_view name) {
  if (name == "bilinear") return KernelKind::Bilinear;
  if (name == "neg_squared_distance") return KernelKind::NegSquaredDistance;
  if (name == "custom") return KernelKind::Custom;
  throw InputError("unknown kernel kind '" + std::string(name) + "'");
}

Kernel::Kernel(KernelKind kind, Box x_box, Box y_box)
    : kind_(kind), name_(to_string(kind)), x_box_(std::move(x_box)), y_box_(std::move(y_box)) {}

Kernel Kernel::bilinear(Box x_box, Box y_box) {
  if (x_box.dim() != y_box.dim()) throw InputError("bilinear kernel: X and Y dimensions differ");
  Kernel k(KernelKind::Bilinear, std::move(x_box), std::move(y_box));
  k.lipschitz_ = std::max(k.x_box_.max_norm(), k.y_box_.max_norm());
  k.semiconvexity_ = 0.0;
  return k;
}

Kernel Kernel::neg_squared_distance(Box x_box, Box y_box) {
  if (x_box.dim() != y_box.dim()) {
    throw InputError("neg_squared_distance kernel: X and Y dimensions differ");
  }
  Kernel k(KernelKind::NegSquaredDistance, std::move(x_box), std::move(y_box));
  // |grad_y Phi| = 2|x - y| <= 2 max over the boxes of |x - y|.
  double s = 0.0;
  for (Eigen::Index i = 0; i < k.x_box_.lower().size(); ++i) {
    const double d = std::max(std::abs(k.x_box_.upper()[i] - k.y_box_.lower()[i]),
                              std::abs(k.y_box_.upper()[i] - k.x_box_.lower()[i]));
    s += d * d;
  }
  k.lipschitz_ = 2.0 * std::sqrt(s);
  k.semiconvexity_ = 2.0;
  return k;
}

namespace {

double fd_rel_error(const Point& analytic, const Point& numeric) {
  return (analytic - numeric).norm() / std::max(1.0, analytic.norm());
}

}  // namespace

Kernel Kernel::custom(Box x_box, Box y_box, CustomSpec spec, std::uint64_t check_seed) {
  if (!spec.eval || !spec.grad_x || !spec.grad_y) {
    throw InputError("custom kernel: eval, grad_x and grad_y are all required");
  }
  if (!(spec.lipschitz >= 0.0) || !(spec.semiconvexity >= 0.0)) {
    throw InputError("custom kernel: lipschitz and semiconvexity must be nonnegative");
  }
  Kernel k(KernelKind::Custom, std::move(x_box), std::move(y_box));
  k.name_ = spec.name.empty() ? "custom" : spec.name;
  k.lipschitz_ = spec.lipschitz;
  k.semiconvexity_ = spec.semiconvexity;
  k.base_semiconvexity_ = spec.semiconvexity;
  k.custom_eval_ = std::move(spec.eval);
  k.custom_grad_x_ = std::move(spec.grad_x);
  k.custom_grad_y_ = std::move(spec.grad_y);
  k.custom_affine_ = std::move(spec.affine_in_x);

  constexpr int kChecks = 16;
  constexpr double kStep = 1e-6;
  constexpr double kTol = 1e-5;
  Rng rng(check_seed);
  for (int c = 0; c < kChecks; ++c) {
    Point x = rng.point_in(k.x_box_);
    Point y = rng.point_in(k.y_box_);
    auto numeric = [&](bool wrt_x) {
      const Point& base = wrt_x ? x : y;
      Point g(base.size());
      for (Eigen::Index i = 0; i < base.size(); ++i) {
        Point p = base, m = base;
        p[i] += kStep;
        m[i] -= kStep;
        const double fp = wrt_x ? k.custom_eval_(p, y) : k.custom_eval_(x, p);
        const double fm = wrt_x ? k.custom_eval_(m, y) : k.custom_eval_(x, m);
        g[i] = (fp - fm) / (2.0 * kStep);
      }
      return g;
    };
    const Point gx = k.custom_grad_x_(x, y);
    const Point gy = k.custom_grad_y_(x, y);
    if (gx.size() != x.size() || gy.size() != y.size()) {
      throw InputError("custom kernel '" + k.name_ + "': gradient has wrong dimension");
    }
    if (fd_rel_error(gx, numeric(true)) > kTol || fd_rel_error(gy, numeric(false)) > kTol) {
      throw InputError("custom kernel '" + k.name_ +
                       "': analytic gradient disagrees with finite differences");
    }
  }
  return k;
}

double Kernel::raw_eval(const Point& a, const Point& b) const {
  switch (kind_) {
    case KernelKind::Bilinear:
      return a.dot(b);
    case KernelKind::NegSquaredDistance:
      return -(a - b).squaredNorm();
    case KernelKind::Custom:
      return custom_eval_(a, b);
  }
  return 0.0;
}

Point Kernel::raw_grad_first(const Point& a, const Point& b) const {
  switch (kind_) {
    case KernelKind::Bilinear:
      return b;
    case KernelKind::NegSquaredDistance:
      return -2.0 * (a - b);
    case KernelKind::Custom:
      return custom_grad_x_(a, b);
  }
  return {};
}

Point Kernel::raw_grad_second(const Point& a, const Point& b) const {
  switch (kind_) {
    case KernelKind::Bilinear:
      return a;
    case KernelKind::NegSquaredDistance:
      return 2.0 * (a - b);
    case KernelKind::Custom:
      return custom_grad_y_(a, b);
  }
  return {};
}

double Kernel::eval(const Point& x, const Point& y) const {
  return transposed_ ? raw_eval(y, x) : raw_eval(x, y);
}

Point Kernel::grad_x(const Point& x, const Point& y) const {
  return transposed_ ? raw_grad_second(y, x) : raw_grad_first(x, y);
}

Point Kernel::grad_y(const Point& x, const Point& y) const {
  return transposed_ ? raw_grad_first(y, x) : raw_grad_second(x, y);
}

Kernel Kernel::transposed() const {
  Kernel k = *this;
  std::swap(k.x_box_, k.y_box_);
  k.transposed_ = !transposed_;
  if (kind_ == KernelKind::Custom) {
    k.semiconvexity_ =
        k.transposed_ ? std::numeric_limits<double>::infinity() : k.base_semiconvexity_;
  }
  return k;
}

std::optional<Kernel::AffineInX> Kernel::affine_in_x() const {
  switch (kind_) {
    case KernelKind::Bilinear:
      return AffineInX{[](const Point& y) { return Point(y); }, [](const Point&) { return 0.0; }};
    case KernelKind::NegSquaredDistance:
      // -|x|^2 depends on x alone and cancels in every transform difference.
      return AffineInX{[](const Point& y) { return Point(2.0 * y); },
                       [](const Point& y) { return -y.squaredNorm(); }};
    case KernelKind::Custom:
      if (transposed_) return std::nullopt;
      return custom_affine_;
  }
  return std::nullopt;
}

}  // namespace gcx
