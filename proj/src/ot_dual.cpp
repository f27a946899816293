#include "gconvex/ot_dual.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Cholesky>

#include "gconvex/errors.hpp"
#include "gconvex/optim.hpp"

namespace gcx::ot {

namespace {

PointSet rows_of(const SampleMeasure& m) { return m.point_set(); }

}  // namespace

SemiDiscreteProblem::SemiDiscreteProblem(SampleMeasure mu, SampleMeasure eta, Kernel kernel)
    : mu_(std::move(mu)), eta_(std::move(eta)), kernel_(std::move(kernel)) {
  if (mu_.dim() != kernel_.x_box().dim() || eta_.dim() != kernel_.y_box().dim()) {
    throw InputError("measure dimensions do not match the kernel");
  }
  surplus_.resize(static_cast<Eigen::Index>(mu_.size()), static_cast<Eigen::Index>(eta_.size()));
  for (std::size_t k = 0; k < mu_.size(); ++k) {
    const Point x = mu_.point(k);
    for (std::size_t i = 0; i < eta_.size(); ++i) {
      surplus_(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) = kernel_.eval(x, eta_.point(i));
    }
  }
}

void SemiDiscreteProblem::check(const Eigen::VectorXd& r) const {
  if (static_cast<std::size_t>(r.size()) != eta_.size()) {
    throw InputError("potential vector has length " + std::to_string(r.size()) + ", expected " +
                     std::to_string(eta_.size()));
  }
}

Eigen::VectorXd SemiDiscreteProblem::phi_on_mu(const Eigen::VectorXd& r) const {
  check(r);
  return (surplus_.rowwise() - r.transpose()).rowwise().maxCoeff();
}

double SemiDiscreteProblem::objective(const Eigen::VectorXd& r) const {
  return mu_.weights().dot(phi_on_mu(r)) + eta_.weights().dot(r);
}

Eigen::VectorXd SemiDiscreteProblem::subgradient(const Eigen::VectorXd& r) const {
  check(r);
  Eigen::VectorXd g = eta_.weights();
  for (Eigen::Index k = 0; k < surplus_.rows(); ++k) {
    Eigen::Index best = 0;
    double bv = surplus_(k, 0) - r[0];
    for (Eigen::Index i = 1; i < surplus_.cols(); ++i) {
      const double v = surplus_(k, i) - r[i];
      if (v > bv) {
        bv = v;
        best = i;
      }
    }
    g[best] -= mu_.weights()[k];
  }
  return g;
}

double SemiDiscreteProblem::smoothed(const Eigen::VectorXd& r, double tau, Eigen::VectorXd* grad,
                                     Eigen::MatrixXd* hess) const {
  check(r);
  const auto m = surplus_.cols();
  double value = eta_.weights().dot(r);
  if (grad) *grad = eta_.weights();
  if (hess) hess->setZero(m, m);
  Eigen::VectorXd w(m);
  for (Eigen::Index k = 0; k < surplus_.rows(); ++k) {
    const Eigen::VectorXd v = (surplus_.row(k) - r.transpose()).transpose();
    const double top = v.maxCoeff();
    w = (tau * (v.array() - top)).exp().matrix();
    const double z = w.sum();
    w /= z;
    const double mk = mu_.weights()[k];
    value += mk * (top + std::log(z) / tau);
    if (grad) *grad -= mk * w;
    if (hess) {
      hess->diagonal() += (mk * tau) * w;
      hess->noalias() -= (mk * tau) * w * w.transpose();
    }
  }
  return value;
}

FiniteGCF SemiDiscreteProblem::potential(const Eigen::VectorXd& r) const {
  check(r);
  return FiniteGCF(kernel_, rows_of(eta_), r);
}

double dual_objective(const Eigen::VectorXd& r, const SampleMeasure& mu, const SampleMeasure& eta,
                      const Kernel& kernel) {
  return SemiDiscreteProblem(mu, eta, kernel).objective(r);
}

Eigen::VectorXd dual_subgradient(const Eigen::VectorXd& r, const SampleMeasure& mu,
                                 const SampleMeasure& eta, const Kernel& kernel) {
  return SemiDiscreteProblem(mu, eta, kernel).subgradient(r);
}

namespace {

struct Best {
  Eigen::VectorXd r;
  double value = std::numeric_limits<double>::infinity();

  void offer(const Eigen::VectorXd& cand, double v) {
    if (v < value) {
      value = v;
      r = cand;
    }
  }
};

// Newton continuation on the smoothed objective with the gauge fixed by
// holding r_0. Returns false when the last stage did not reach tolerance.
bool newton_polish(const SemiDiscreteProblem& p, const SolverConfig& cfg, double scale,
                   Eigen::VectorXd r, Best& best, std::vector<double>& trace) {
  const auto m = static_cast<Eigen::Index>(p.targets());
  if (m == 1) return true;
  bool last_ok = false;
  for (double tau_rel = cfg.tau_start; tau_rel <= cfg.tau_end * (1.0 + 1e-12); tau_rel *= cfg.tau_factor) {
    const double tau = tau_rel / scale;
    last_ok = false;
    Eigen::VectorXd grad;
    Eigen::MatrixXd hess;
    double f = p.smoothed(r, tau, &grad, &hess);
    for (std::size_t it = 0; it < cfg.newton_iterations; ++it) {
      const Eigen::VectorXd g = grad.tail(m - 1);
      // Rounding in r moves the softmax weights by about tau * eps * |r|.
      const double floor = 16.0 * std::numeric_limits<double>::epsilon() * tau * (1.0 + r.cwiseAbs().maxCoeff());
      if (g.lpNorm<Eigen::Infinity>() <= std::max(cfg.gradient_tolerance, floor)) {
        last_ok = true;
        break;
      }
      Eigen::MatrixXd h = hess.bottomRightCorner(m - 1, m - 1);
      const double diag_max = h.diagonal().maxCoeff();
      if (!(diag_max > 0.0)) break;
      h.diagonal().array() += 1e-12 * diag_max;
      const Eigen::VectorXd dir = -h.ldlt().solve(g);
      if (!dir.allFinite()) break;
      const double slope = g.dot(dir);
      double t = 1.0;
      bool accepted = false;
      Eigen::VectorXd cand = r;
      for (int ls = 0; ls < 60; ++ls) {
        cand.tail(m - 1) = r.tail(m - 1) + t * dir;
        Eigen::VectorXd cg;
        Eigen::MatrixXd ch;
        const double cf = p.smoothed(cand, tau, &cg, &ch);
        if (cf <= f + 1e-4 * t * slope) {
          r = cand;
          f = cf;
          grad = std::move(cg);
          hess = std::move(ch);
          accepted = true;
          break;
        }
        t *= 0.5;
      }
      if (!accepted) break;  // no representable decrease left
      best.offer(r, p.objective(r));
      trace.push_back(best.value);
    }
    best.offer(r, p.objective(r));
  }
  return last_ok;
}

}  // namespace

DualSolution solve_dual(const SemiDiscreteProblem& problem, const SolverConfig& config) {
  const auto m = static_cast<Eigen::Index>(problem.targets());
  const Eigen::MatrixXd& s = problem.surplus();
  const double range = std::max(s.maxCoeff() - s.minCoeff(), 1e-12);
  const double step_scale = config.step_scale > 0.0 ? config.step_scale : 0.5 * range;

  DualSolution out{problem.potential(Eigen::VectorXd::Zero(m)), 0.0, 0, {}, true, {}};
  Best best;
  const Eigen::VectorXd start = Eigen::VectorXd::Zero(m);
  best.offer(start, problem.objective(start));

  AveragedSubgradient sg(start, step_scale);
  for (std::size_t t = 0; t < config.subgradient_iterations; ++t) {
    sg.step(problem.subgradient(sg.iterate()));
    best.offer(sg.iterate(), problem.objective(sg.iterate()));
    best.offer(sg.average(), problem.objective(sg.average()));
    out.trace.push_back(best.value);
  }
  out.iterations = config.subgradient_iterations;

  if (config.polish) {
    Eigen::VectorXd warm = best.r;
    warm.array() -= warm[0];
    const std::size_t before = out.trace.size();
    const bool ok = newton_polish(problem, config, range, warm, best, out.trace);
    out.iterations += out.trace.size() - before;
    if (!ok) {
      out.converged = false;
      out.warnings.push_back("smoothed Newton refinement did not reach the gradient tolerance");
    }
  }

  // Lean projection on the mu atoms: r_i <- max_k Phi(x_k, y_i) - phi(x_k).
  const Eigen::VectorXd phi = problem.phi_on_mu(best.r);
  Eigen::VectorXd lean = (s.colwise() - phi).colwise().maxCoeff().transpose();
  for (Eigen::Index i = 0; i < m; ++i) {
    if (problem.eta().weights()[i] == 0.0) lean[i] = std::min(lean[i], best.r[i]);
  }
  best.offer(lean, problem.objective(lean));
  out.trace.push_back(best.value);

  out.potential = problem.potential(best.r);
  out.value = best.value;
  return out;
}

DualSolution solve_dual(const SampleMeasure& mu, const SampleMeasure& eta, const Kernel& kernel,
                        const SolverConfig& config) {
  return solve_dual(SemiDiscreteProblem(mu, eta, kernel), config);
}

std::size_t extract_map(const DualSolution& solution, const Point& x) {
  return active_entry(solution.potential, x).index;
}

TransportAssignment assign(const DualSolution& solution, const SemiDiscreteProblem& problem) {
  TransportAssignment a;
  a.target.resize(problem.mu().size());
  for (std::size_t k = 0; k < problem.mu().size(); ++k) {
    a.target[k] = extract_map(solution, problem.mu().point(k));
    a.objective += problem.mu().weights()[static_cast<Eigen::Index>(k)] *
                   problem.surplus()(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(a.target[k]));
  }
  return a;
}

}  // namespace gcx::ot
