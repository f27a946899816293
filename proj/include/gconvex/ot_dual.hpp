#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gconvex/finite_gcf.hpp"
#include "gconvex/gcf_io.hpp"
#include "gconvex/measure.hpp"

namespace gcx::ot {

/// Semi-discrete Kantorovich dual in the finite parameterization
///   F(r) = sum_k mu_k max_i { Phi(x_k, y_i) - r_i } + sum_i eta_i r_i,
/// i.e. phi = r^{Y~} and psi = r on the atoms of eta. The surplus matrix
/// Phi(x_k, y_i) is evaluated once at construction.
class SemiDiscreteProblem {
 public:
  SemiDiscreteProblem(SampleMeasure mu, SampleMeasure eta, Kernel kernel);

  const SampleMeasure& mu() const { return mu_; }
  const SampleMeasure& eta() const { return eta_; }
  const Kernel& kernel() const { return kernel_; }
  const Eigen::MatrixXd& surplus() const { return surplus_; }
  std::size_t targets() const { return eta_.size(); }

  double objective(const Eigen::VectorXd& r) const;
  /// eta_i - (mu-mass whose lowest-index argmax is i).
  Eigen::VectorXd subgradient(const Eigen::VectorXd& r) const;
  /// phi(x_k) = max_i { Phi(x_k, y_i) - r_i } at every mu atom.
  Eigen::VectorXd phi_on_mu(const Eigen::VectorXd& r) const;

  /// LSE-smoothed objective, its gradient and Hessian at temperature tau.
  double smoothed(const Eigen::VectorXd& r, double tau, Eigen::VectorXd* grad,
                  Eigen::MatrixXd* hess) const;

  FiniteGCF potential(const Eigen::VectorXd& r) const;

 private:
  void check(const Eigen::VectorXd& r) const;

  SampleMeasure mu_;
  SampleMeasure eta_;
  Kernel kernel_;
  Eigen::MatrixXd surplus_;  // mu atoms x eta atoms
};

double dual_objective(const Eigen::VectorXd& r, const SampleMeasure& mu, const SampleMeasure& eta,
                      const Kernel& kernel);
Eigen::VectorXd dual_subgradient(const Eigen::VectorXd& r, const SampleMeasure& mu,
                                 const SampleMeasure& eta, const Kernel& kernel);

struct SolverConfig {
  // Averaged subgradient phase, step = step_scale / sqrt(t). A step_scale of
  // zero picks 0.5 * (range of the surplus matrix).
  std::size_t subgradient_iterations = 2000;
  double step_scale = 0.0;
  // Smoothed Newton continuation. Temperatures are multiplied by
  // 1 / (range of the surplus matrix) so they are scale free.
  bool polish = true;
  double tau_start = 1.0;
  double tau_end = 1e8;
  double tau_factor = 10.0;
  std::size_t newton_iterations = 100;
  double gradient_tolerance = 1e-9;
};

struct DualSolution {
  FiniteGCF potential;  // phi = r^{Y~}, support = eta atoms
  double value = 0.0;
  std::size_t iterations = 0;
  std::vector<double> trace;  // best objective so far, one entry per iteration
  bool converged = true;
  std::vector<std::string> warnings;
};

/// Minimizes F by averaged subgradient descent, then refines with Newton
/// steps on the LSE-smoothed objective while raising the temperature (the
/// smoothed minimizer is within ln(m)/tau of optimal). Keeps the best iterate
/// seen and finally lean-projects it on the mu atoms, which never increases F.
DualSolution solve_dual(const SemiDiscreteProblem& problem, const SolverConfig& config = {});
DualSolution solve_dual(const SampleMeasure& mu, const SampleMeasure& eta, const Kernel& kernel,
                        const SolverConfig& config = {});

/// Lowest-index argmax of Phi(x, y_i) - r_i: the target the twist condition
/// sends x to.
std::size_t extract_map(const DualSolution& solution, const Point& x);

struct TransportAssignment {
  std::vector<std::size_t> target;  // per mu atom
  double objective = 0.0;           // sum_k mu_k Phi(x_k, y_target(k))
};

TransportAssignment assign(const DualSolution& solution, const SemiDiscreteProblem& problem);

struct Instance {
  SampleMeasure mu;
  SampleMeasure eta;
  Kernel kernel;
};

/// {mu: {points, weights}, eta: {points, weights}, kernel}; kernel is a kind
/// name or {kind, x_box?, y_box?}. Boxes default to the bounding boxes of
/// the atoms. Errors name the offending field.
Instance instance_from_json(const Json& j);
Json to_json(const Instance& instance);
/// {value, potentials, assignment, converged, iterations}
Json solution_json(const DualSolution& solution, const TransportAssignment& assignment);

}  // namespace gcx::ot

namespace gcx::ot {

/// Ten small discrete instances (up to 6 x 6 atoms, bilinear surplus, dims
/// 1 to 3) drawn from fixed seeds. Every atom has mass k / 12 for an
/// integer k, so exact_transport solves them exactly.
std::vector<Instance> bundled_instances();

}  // namespace gcx::ot
