#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gconvex/finite_gcf.hpp"
#include "gconvex/gcf_io.hpp"

namespace gcx {

struct EpsilonNet {
  PointSet centers;
  double radius = 0.0;  // every point of the box is within radius of a center
  Box box;
  std::vector<std::size_t> per_axis;  // centres along each axis
};

inline constexpr std::size_t kDefaultNetCap = std::size_t{1} << 22;

/// Cell-centred axis-aligned lattice with covering radius <= eps / (2 lambda).
/// Collapses to the box midpoint when that alone covers the box. Throws
/// ResourceError when the lattice would exceed max_centers.
EpsilonNet build_epsilon_net(const Box& box, double epsilon, double lipschitz,
                             std::size_t max_centers = kDefaultNetCap);

/// max_i { Phi(x, y_i) - r_i } as a plain loop over kernel.eval. Test oracle.
double oracle_transform(const PointSet& support, const Eigen::VectorXd& potentials, const Kernel& kernel,
                        const Point& x);

/// g(x) = max_c { Phi(x, c) - f^X(c) } over the net centres, with the
/// conjugate f^X taken over x_grid.
FiniteGCF uap_approximant(const FiniteGCF& f_dense, const EpsilonNet& net, const PointSet& x_grid);
FiniteGCF uap_approximant(const FiniteGCF& f_dense, const PointSet& centers, const PointSet& x_grid);

/// sup over the grid of |f_dense - g|, g = uap_approximant(f_dense, net, grid).
/// On grid points g <= f_dense, so refining the net never increases this.
double uap_error(const FiniteGCF& f_dense, const EpsilonNet& net, const PointSet& grid);
double uap_error(const FiniteGCF& f_dense, const PointSet& centers, const PointSet& grid);

struct GradCheckReport {
  double max_rel_error = 0.0;
  Point worst_point;
  double step = 0.0;
};

/// Central differences with step h against an analytic gradient. Relative
/// error is |fd - analytic| / max(|analytic|, 1).
GradCheckReport fd_gradient_check(const std::function<double(const Point&)>& value,
                                  const std::function<Point(const Point&)>& gradient,
                                  const PointSet& points, double step = 1e-6);

struct GradConvergenceReport {
  std::vector<double> errors;       // per sequence member
  std::vector<Point> worst_points;  // per sequence member
  std::size_t probes_used = 0;      // probes with argmax margin >= threshold
  bool decreasing = true;           // errors nonincreasing along the sequence
};

/// max over probe points where f_limit's argmax beats the runner-up by at
/// least `margin` of |grad f_n - grad f_limit|. Probes closer than
/// `boundary_margin` to the boundary of the domain are skipped too: uniform
/// closeness of values says nothing about gradients at the boundary.
GradConvergenceReport grad_convergence_check(const std::vector<FiniteGCF>& sequence,
                                             const FiniteGCF& f_limit, const PointSet& probe,
                                             double margin, double boundary_margin = 0.0);

struct LpConjugate {
  double value = 0.0;
  Point argmax;
};

/// Exact f^X(y) = max_{x in box} min_i { Phi(x, y) - Phi(x, y_i) + r_i } for
/// kernels affine in x up to a term in x alone, by enumerating every vertex
/// of the (x, s) feasible
/// set. Throws UnsupportedError for other kernels, InputError for n > 3.
LpConjugate lp_conjugate_oracle(const FiniteGCF& f, const Point& y);

/// r -> (r^{X Y~}) restricted to the support, with the transform over the
/// whole box X taken exactly by lp_conjugate_oracle.
FiniteGCF exact_lean_project(const FiniteGCF& f);
/// Largest r_i - (exact lean projection)_i; zero up to rounding iff lean.
double exact_lean_shortfall(const FiniteGCF& f);

struct DiscreteTransport {
  double value = 0.0;     // max sum_{k,i} plan_ki * surplus_ki
  Eigen::MatrixXd plan;   // couples mu rows to eta columns
  long denominator = 1;   // common unit the masses were scaled by
};

/// Exact discrete optimal transport by branch and bound over integral
/// transport tables. Weights must be multiples of 1/D for some
/// D <= max_denominator (vertices of the transport polytope are integral in
/// those units). Throws UnsupportedError otherwise and ResourceError when
/// the instance has more than max_units units of mass.
DiscreteTransport exact_transport(const Eigen::MatrixXd& surplus, const Eigen::VectorXd& mu_weights,
                                  const Eigen::VectorXd& eta_weights, long max_denominator = 1000,
                                  long max_units = 64);

struct ValidationReport {
  std::string check_name;
  std::size_t instances = 0;
  double max_error = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

Json to_json(const ValidationReport& report);

}  // namespace gcx
