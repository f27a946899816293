#include "gconvex/validate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "gconvex/auction.hpp"
#include "gconvex/errors.hpp"
#include "gconvex/ot_dual.hpp"
#include "gconvex/rng.hpp"

namespace gcx::validate {

namespace {

ValidationReport report(std::string name, std::size_t instances, double max_error, double tolerance) {
  return ValidationReport{std::move(name), instances, max_error, tolerance, max_error <= tolerance};
}

Kernel kernel_for(bool bilinear, std::size_t dim) {
  const Box unit = Box::unit(dim);
  return bilinear ? Kernel::bilinear(unit, unit) : Kernel::neg_squared_distance(unit, unit);
}

FiniteGCF random_gcf(Rng& rng, const Kernel& kernel, std::size_t m) {
  PointSet support;
  Eigen::VectorXd r(static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < m; ++i) {
    support.push_back(rng.point_in(kernel.y_box()));
    r[static_cast<Eigen::Index>(i)] = rng.uniform(-0.5, 0.5);
  }
  return FiniteGCF(kernel, std::move(support), std::move(r));
}

Point interior_point(Rng& rng, std::size_t dim, double inset) {
  Point p(static_cast<Eigen::Index>(dim));
  for (Eigen::Index j = 0; j < p.size(); ++j) p[j] = rng.uniform(inset, 1.0 - inset);
  return p;
}

std::string fmt(const char* pattern, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, pattern, a);
  return buf;
}

// A smooth non-bilinear kernel used to exercise the custom-kernel path.
Kernel wavy_kernel(std::size_t dim) {
  Kernel::CustomSpec spec;
  spec.name = "wavy";
  spec.eval = [](const Point& x, const Point& y) {
    return x.dot(y) + 0.1 * x.array().sin().matrix().dot(y);
  };
  spec.grad_x = [](const Point& x, const Point& y) {
    return Point(y.array() + 0.1 * x.array().cos() * y.array());
  };
  spec.grad_y = [](const Point& x, const Point&) { return Point(x.array() + 0.1 * x.array().sin()); };
  spec.lipschitz = 1.1 * std::sqrt(static_cast<double>(dim));
  spec.semiconvexity = 0.1;
  const Box unit = Box::unit(dim);
  return Kernel::custom(unit, unit, std::move(spec));
}

}  // namespace

bool SuiteResult::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const ValidationReport& r) { return r.pass; });
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"lemmas",  "lean",    "uap",
                                              "gradients", "duality", "auction-identities"};
  return names;
}

SuiteResult run_suite(const std::string& name) {
  if (name == "lemmas") return lemmas();
  if (name == "lean") return lean();
  if (name == "uap") return uap();
  if (name == "gradients") return gradients();
  if (name == "duality") return duality();
  if (name == "auction-identities") return auction_identities();
  throw InputError("unknown validation suite '" + name + "'");
}

SuiteResult lemmas() {
  constexpr std::size_t kInstances = 1000;
  Rng rng(0x1e44a5);
  double fenchel_young = 0.0;
  double order_reversal = 0.0;
  double oracle = 0.0;
  double dominance = 0.0;
  double biconjugation = 0.0;
  for (std::size_t t = 0; t < kInstances; ++t) {
    const std::size_t dim = 1 + t % 3;
    const Kernel kernel = kernel_for((t / 3) % 2 == 0, dim);
    const FiniteGCF f = random_gcf(rng, kernel, 1 + rng.below(8));
    Eigen::VectorXd raised = f.potentials();
    for (Eigen::Index i = 0; i < raised.size(); ++i) raised[i] += rng.uniform(0.0, 0.3);
    const FiniteGCF g = f.with_potentials(raised);

    for (int s = 0; s < 8; ++s) {
      const Point x = rng.point_in(f.domain());
      const double fx = gcf_eval(f, x);
      for (std::size_t i = 0; i < f.size(); ++i) {
        const double inner = kernel.eval(x, f.support()[i]) - f.potentials()[static_cast<Eigen::Index>(i)];
        fenchel_young = std::max(fenchel_young, inner - fx);
      }
      oracle = std::max(oracle, std::abs(fx - oracle_transform(f.support(), f.potentials(), kernel, x)));
      order_reversal = std::max(order_reversal, gcf_eval(g, x) - fx);
    }

    const PointSet grid = lattice(f.domain(), dim == 1 ? 33 : (dim == 2 ? 9 : 5));
    const FiniteGCF projected = lean_project(f, grid);
    dominance = std::max(dominance, (projected.potentials() - f.potentials()).maxCoeff());

    const FiniteGCF first = conjugate_on_grid(f, grid);
    const FiniteGCF again = conjugate_on_grid(projected, grid);
    PointSet ys = f.support();
    for (int s = 0; s < 4; ++s) ys.push_back(rng.point_in(f.support_box()));
    for (const auto& y : ys) biconjugation = std::max(biconjugation, std::abs(gcf_eval(first, y) - gcf_eval(again, y)));
  }
  SuiteResult out{"lemmas", {}, {}};
  out.checks.push_back(report("fenchel_young", kInstances, fenchel_young, 0.0));
  out.checks.push_back(report("order_reversal", kInstances, order_reversal, 0.0));
  out.checks.push_back(report("transform_matches_oracle", kInstances, oracle, 0.0));
  out.checks.push_back(report("lean_projection_dominance", kInstances, dominance, 1e-12));
  out.checks.push_back(report("biconjugation", kInstances, biconjugation, 1e-12));
  return out;
}

SuiteResult lean() {
  constexpr std::size_t kInstances = 100;
  constexpr double kTol = 1e-9;
  Rng rng(0x1ea4);
  double idempotence = 0.0;
  double not_lean_after_projection = 0.0;
  double iff_mismatch = 0.0;
  double exact_convexity = 0.0;
  double grid_convexity_ratio = 0.0;
  std::size_t grid_mixes = 0;
  std::size_t grid_mixes_strict_fail = 0;
  for (std::size_t t = 0; t < kInstances; ++t) {
    const std::size_t dim = 1 + t % 3;
    const std::size_t per_axis = dim == 1 ? 65 : (dim == 2 ? 17 : 9);
    const Kernel kernel = kernel_for((t / 3) % 2 == 0, dim);
    const PointSet grid = lattice(kernel.x_box(), per_axis);
    const std::size_t m = 2 + rng.below(7);
    const FiniteGCF f = random_gcf(rng, kernel, m);

    const FiniteGCF once = lean_project(f, grid);
    const FiniteGCF twice = lean_project(once, grid);
    idempotence = std::max(idempotence, (twice.potentials() - once.potentials()).cwiseAbs().maxCoeff());
    if (!is_lean(once, grid, kTol).lean) not_lean_after_projection += 1.0;

    Eigen::VectorXd bumped = once.potentials();
    bumped[static_cast<Eigen::Index>(rng.below(m))] += rng.uniform(0.0, 0.05);
    for (const FiniteGCF& g : {f, once, once.with_potentials(bumped)}) {
      const bool lean_flag = is_lean(g, grid, kTol).lean;
      const double moved = (lean_project(g, grid).potentials() - g.potentials()).cwiseAbs().maxCoeff();
      if (lean_flag != (moved <= kTol)) iff_mismatch += 1.0;
    }

    // Convex combinations of lean parameterizations on a shared support.
    const FiniteGCF other = f.with_potentials(random_gcf(rng, kernel, m).potentials());
    const FiniteGCF a = exact_lean_project(f);
    const FiniteGCF b = exact_lean_project(other);
    const FiniteGCF ga = lean_project(f, grid);
    const FiniteGCF gb = lean_project(other, grid);
    const double bound = kernel.lipschitz() * std::sqrt(static_cast<double>(dim)) / static_cast<double>(per_axis - 1);
    for (int l = 1; l <= 9; ++l) {
      const double w = 0.1 * l;
      const FiniteGCF mix = a.with_potentials(w * a.potentials() + (1.0 - w) * b.potentials());
      exact_convexity = std::max(exact_convexity, exact_lean_shortfall(mix));
      const FiniteGCF gmix = ga.with_potentials(w * ga.potentials() + (1.0 - w) * gb.potentials());
      const double shortfall = (gmix.potentials() - lean_project(gmix, grid).potentials()).maxCoeff();
      grid_convexity_ratio = std::max(grid_convexity_ratio, shortfall / bound);
      ++grid_mixes;
      if (!is_lean(gmix, grid, kTol).lean) ++grid_mixes_strict_fail;
    }
  }
  SuiteResult out{"lean", {}, {}};
  out.checks.push_back(report("lean_project_idempotent", kInstances, idempotence, kTol));
  out.checks.push_back(report("lean_project_output_is_lean", kInstances, not_lean_after_projection, 0.0));
  out.checks.push_back(report("lean_iff_fixed_point", 3 * kInstances, iff_mismatch, 0.0));
  out.checks.push_back(report("lean_set_convex_exact", 9 * kInstances, exact_convexity, kTol));
  out.checks.push_back(
      report("lean_set_convex_grid_shortfall_over_lipschitz_h_sqrt_n", 9 * kInstances, grid_convexity_ratio, 1.0));
  out.notes.push_back(std::to_string(grid_mixes_strict_fail) + " of " + std::to_string(grid_mixes) +
                      " grid-lean mixtures are not lean on the grid itself at tol 1e-9 (the grid is a finite X, "
                      "where the lean set need not be convex)");
  return out;
}

SuiteResult uap() {
  SuiteResult out{"uap", {}, {}};
  const std::vector<double> eps{0.2, 0.1, 0.05};
  double bound_ratio = 0.0;
  double own_support = 0.0;
  double nested_increase = -std::numeric_limits<double>::infinity();
  std::size_t bound_cases = 0;
  for (std::size_t dim = 1; dim <= 2; ++dim) {
    const Kernel kernel = kernel_for(true, dim);
    const PointSet grid = lattice(kernel.x_box(), dim == 1 ? 1025 : 65);
    for (std::size_t inst = 0; inst < 5; ++inst) {
      Rng rng(0x0a9 + 10 * dim + inst);
      const PointSet support = lattice(kernel.y_box(), dim == 1 ? 201 : 31);
      Eigen::VectorXd r(static_cast<Eigen::Index>(support.size()));
      for (std::size_t i = 0; i < support.size(); ++i) {
        r[static_cast<Eigen::Index>(i)] = 0.5 * support[i].squaredNorm() + 0.05 * rng.uniform01();
      }
      const FiniteGCF f(kernel, support, r);
      own_support = std::max(own_support, uap_error(f, f.support(), grid));
      PointSet nested;
      double previous = std::numeric_limits<double>::infinity();
      for (double e : eps) {
        const EpsilonNet net = build_epsilon_net(kernel.y_box(), e, kernel.lipschitz());
        bound_ratio = std::max(bound_ratio, uap_error(f, net, grid) / e);
        ++bound_cases;
        nested.insert(nested.end(), net.centers.begin(), net.centers.end());
        const double err = uap_error(f, nested, grid);
        nested_increase = std::max(nested_increase, err - previous);
        previous = err;
      }
    }
  }
  ValidationReport bound = report("uap_error_over_epsilon", bound_cases, bound_ratio, 1.0);
  bound.pass = bound_ratio < 1.0;  // strict
  out.checks.push_back(bound);
  out.checks.push_back(report("uap_error_own_support", 10, own_support, 1e-12));
  out.checks.push_back(report("uap_error_nested_refinement_increase", 10, std::max(nested_increase, 0.0), 1e-9));

  // Gradient convergence under refinement: nets for eps = 0.2 / 2^k are
  // merged so each net contains the previous one.
  const std::vector<double> grad_eps{0.2, 0.1, 0.05, 0.025};
  std::vector<double> worst(grad_eps.size(), 0.0);
  std::size_t instances = 0;
  std::size_t non_monotone = 0;
  for (int bilinear = 1; bilinear >= 0; --bilinear) {
    for (std::size_t dim = 1; dim <= 2; ++dim) {
      const Kernel kernel = kernel_for(bilinear == 1, dim);
      const PointSet grid = lattice(kernel.x_box(), dim == 1 ? 513 : 97);
      for (std::size_t inst = 0; inst < 5; ++inst) {
        Rng rng(0x67ad + 100 * dim + inst + 1000 * static_cast<std::size_t>(bilinear));
        PointSet support;
        Eigen::VectorXd r(6);
        for (Eigen::Index i = 0; i < 6; ++i) {
          support.push_back(rng.point_in(kernel.y_box()));
          r[i] = (bilinear ? 0.5 * support.back().squaredNorm() : 0.0) + 0.1 * rng.uniform01();
        }
        const FiniteGCF f(kernel, support, r);
        std::vector<FiniteGCF> seq;
        PointSet nested;
        for (double e : grad_eps) {
          const EpsilonNet net = build_epsilon_net(kernel.y_box(), e, kernel.lipschitz());
          nested.insert(nested.end(), net.centers.begin(), net.centers.end());
          seq.push_back(uap_approximant(f, nested, grid));
        }
        const GradConvergenceReport g = grad_convergence_check(seq, f, grid, 0.05, 0.1);
        if (g.probes_used == 0) continue;
        ++instances;
        if (!g.decreasing) ++non_monotone;
        for (std::size_t k = 0; k < worst.size(); ++k) worst[k] = std::max(worst[k], g.errors[k]);
      }
    }
  }
  double increase = 0.0;
  std::string levels;
  for (std::size_t k = 0; k < worst.size(); ++k) {
    if (k > 0) increase = std::max(increase, worst[k] - worst[k - 1]);
    levels += (k ? ", " : "") + fmt("%.4f", worst[k]);
  }
  out.checks.push_back(report("grad_error_uniform_increase_under_refinement", instances, increase, 0.0));
  out.checks.push_back(report("grad_error_uniform_finest_net", instances, worst.back(), 0.05));
  out.notes.push_back("uniform gradient error per refinement level (eps 0.2, 0.1, 0.05, 0.025): " + levels);
  out.notes.push_back(std::to_string(non_monotone) + " of " + std::to_string(instances) +
                      " single instances have a non-monotone gradient error sequence");
  return out;
}

SuiteResult gradients() {
  SuiteResult out{"gradients", {}, {}};
  Rng rng(0x9ad);

  double kernel_err = 0.0;
  std::size_t kernel_cases = 0;
  for (std::size_t dim = 1; dim <= 3; ++dim) {
    for (const Kernel& k : {kernel_for(true, dim), kernel_for(false, dim), wavy_kernel(dim)}) {
      PointSet xs;
      for (int s = 0; s < 50; ++s) xs.push_back(interior_point(rng, dim, 0.01));
      const Point y = interior_point(rng, dim, 0.01);
      const Point x0 = interior_point(rng, dim, 0.01);
      kernel_err = std::max(kernel_err, fd_gradient_check([&](const Point& x) { return k.eval(x, y); },
                                                          [&](const Point& x) { return k.grad_x(x, y); }, xs)
                                            .max_rel_error);
      kernel_err = std::max(kernel_err, fd_gradient_check([&](const Point& v) { return k.eval(x0, v); },
                                                          [&](const Point& v) { return k.grad_y(x0, v); }, xs)
                                            .max_rel_error);
      kernel_cases += 100;
    }
  }
  out.checks.push_back(report("kernel_gradients_fd", kernel_cases, kernel_err, 1e-5));

  double smooth_err = 0.0;
  double hard_err = 0.0;
  double smooth_vs_hard = 0.0;
  std::size_t hard_points = 0;
  std::size_t close_points = 0;
  for (std::size_t t = 0; t < 200; ++t) {
    const std::size_t dim = 1 + t % 3;
    const Kernel kernel = kernel_for((t / 3) % 2 == 0, dim);
    const FiniteGCF f = random_gcf(rng, kernel, 1 + rng.below(8));
    const Temperature tau(t % 3 == 0 ? 1.0 : (t % 3 == 1 ? 10.0 : 100.0));
    PointSet xs;
    for (int s = 0; s < 5; ++s) xs.push_back(interior_point(rng, dim, 0.01));
    smooth_err = std::max(smooth_err, fd_gradient_check([&](const Point& x) { return gcf_eval_smooth(f, x, tau); },
                                                        [&](const Point& x) { return gcf_grad_smooth(f, x, tau); }, xs)
                                          .max_rel_error);
    PointSet separated;
    for (const auto& x : xs) {
      const double margin = active_entry(f, x).margin;
      if (margin >= 1e-4) separated.push_back(x);
      if (margin >= 0.01) {
        ++close_points;
        smooth_vs_hard = std::max(smooth_vs_hard, (gcf_grad_smooth(f, x, Temperature(1e4)) - gcf_grad(f, x)).norm());
      }
    }
    hard_points += separated.size();
    if (!separated.empty()) {
      hard_err = std::max(hard_err, fd_gradient_check([&](const Point& x) { return gcf_eval(f, x); },
                                                      [&](const Point& x) { return gcf_grad(f, x); }, separated)
                                        .max_rel_error);
    }
  }
  out.checks.push_back(report("gcf_grad_smooth_fd", 1000, smooth_err, 1e-6));
  out.checks.push_back(report("gcf_grad_fd_margin_points", hard_points, hard_err, 1e-5));
  out.checks.push_back(report("gcf_grad_smooth_tau_1e4_vs_hard", close_points, smooth_vs_hard, 1e-3));

  // Soft revenue gradient with respect to every free menu parameter.
  double revenue_err = 0.0;
  for (std::size_t t = 0; t < 20; ++t) {
    const std::size_t n = 2;
    const std::size_t m = 4;
    Eigen::MatrixXd alloc(m, n);
    Eigen::VectorXd prices(m);
    alloc.row(0).setZero();
    prices[0] = 0.0;
    for (std::size_t i = 1; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) alloc(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rng.uniform(0.05, 0.95);
      prices[static_cast<Eigen::Index>(i)] = rng.uniform(0.0, 1.0);
    }
    const SampleMeasure types = SampleMeasure::draw_uniform(Box::unit(n), 64, rng);
    const Temperature tau(t % 2 == 0 ? 5.0 : 50.0);
    const auto pack = [&](const Eigen::MatrixXd& a, const Eigen::VectorXd& p) {
      Point v((m - 1) * n + (m - 1));
      Eigen::Index c = 0;
      for (std::size_t i = 1; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) v[c++] = a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      }
      for (std::size_t i = 1; i < m; ++i) v[c++] = p[static_cast<Eigen::Index>(i)];
      return v;
    };
    const auto unpack = [&](const Point& v) {
      Eigen::MatrixXd a = alloc;
      Eigen::VectorXd p = prices;
      Eigen::Index c = 0;
      for (std::size_t i = 1; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v[c++];
      }
      for (std::size_t i = 1; i < m; ++i) p[static_cast<Eigen::Index>(i)] = v[c++];
      return auction::Menu(a, p);
    };
    const auto value = [&](const Point& v) { return auction::soft_revenue_value(unpack(v), types, tau); };
    const auto grad = [&](const Point& v) {
      const auction::SoftRevenue s = auction::soft_revenue(unpack(v), types, tau);
      return pack(s.grad_allocations, s.grad_prices);
    };
    revenue_err = std::max(revenue_err, fd_gradient_check(value, grad, {pack(alloc, prices)}).max_rel_error);
  }
  out.checks.push_back(report("soft_revenue_gradient_fd", 20, revenue_err, 1e-5));

  double residual = 0.0;
  for (std::size_t t = 0; t < 50; ++t) {
    Eigen::MatrixXd alloc(6, 2);
    Eigen::VectorXd prices(6);
    alloc.row(0).setZero();
    prices[0] = 0.0;
    for (Eigen::Index i = 1; i < 6; ++i) {
      alloc(i, 0) = rng.uniform01();
      alloc(i, 1) = rng.uniform01();
      prices[i] = rng.uniform(0.0, 1.0);
    }
    const auction::Menu menu(alloc, prices);
    residual = std::max(residual, auction::payment_integral_residual(menu, Temperature(50.0), rng.point_in(Box::unit(2)),
                                                                     auction::Anchor::origin(2), 256));
  }
  out.checks.push_back(report("payment_integral_residual_smoothed", 50, residual, 1e-4));

  Eigen::MatrixXd alloc(2, 1);
  alloc << 0.0, 1.0;
  const auction::Menu posted(alloc, Eigen::Vector2d(0.0, 0.5));
  const double hard = auction::payment_integral_residual(posted, std::nullopt, Point::Constant(1, 0.9),
                                                         auction::Anchor::origin(1));
  out.checks.push_back(report("payment_integral_residual_hard_kink", 1, hard, 1e-6));
  return out;
}

SuiteResult duality() {
  SuiteResult out{"duality", {}, {}};
  const auto instances = ot::bundled_instances();
  double gap = 0.0;
  double infeasible = 0.0;
  double convexity = 0.0;
  Rng rng(0xd0a1);
  for (const auto& inst : instances) {
    const ot::SemiDiscreteProblem problem(inst.mu, inst.eta, inst.kernel);
    const ot::DualSolution sol = ot::solve_dual(problem);
    const DiscreteTransport exact = exact_transport(problem.surplus(), inst.mu.weights(), inst.eta.weights());
    gap = std::max(gap, std::abs(sol.value - exact.value));
    const Eigen::VectorXd& r = sol.potential.potentials();
    const Eigen::VectorXd phi = problem.phi_on_mu(r);
    for (Eigen::Index k = 0; k < problem.surplus().rows(); ++k) {
      for (Eigen::Index i = 0; i < problem.surplus().cols(); ++i) {
        infeasible = std::max(infeasible, (problem.surplus()(k, i) - r[i]) - phi[k]);
      }
    }
    for (int s = 0; s < 20; ++s) {
      Eigen::VectorXd r0(r.size());
      Eigen::VectorXd d(r.size());
      for (Eigen::Index i = 0; i < r.size(); ++i) {
        r0[i] = rng.uniform(-1.0, 1.0);
        d[i] = rng.uniform(-1.0, 1.0);
      }
      const double h = 1e-7;
      const double directional = (problem.objective(r0 + h * d) - problem.objective(r0)) / h;
      convexity = std::max(convexity, problem.subgradient(r0).dot(d) - directional);
    }
  }
  out.checks.push_back(report("strong_duality_bundled", instances.size(), gap, 1e-6));
  out.checks.push_back(report("dual_feasibility", instances.size(), std::max(infeasible, 0.0), 0.0));
  out.checks.push_back(report("subgradient_below_directional_derivative", 20 * instances.size(),
                              std::max(convexity, 0.0), 1e-8));

  Eigen::MatrixXd two(2, 1);
  two << 0.0, 1.0;
  const ot::SemiDiscreteProblem p2(SampleMeasure::uniform(two), SampleMeasure::uniform(two),
                                   Kernel::bilinear(Box::unit(1), Box::unit(1)));
  const ot::DualSolution s2 = ot::solve_dual(p2);
  const ot::TransportAssignment a2 = ot::assign(s2, p2);
  const bool two_ok = a2.target == std::vector<std::size_t>{0, 1};
  out.checks.push_back(report("two_by_two_value", 1, std::abs(s2.value - 0.5), 1e-6));
  out.checks.push_back(report("two_by_two_assignment_mismatches", 1, two_ok ? 0.0 : 1.0, 0.0));

  Eigen::MatrixXd pts(5, 2);
  for (Eigen::Index k = 0; k < 5; ++k) pts.row(k) = rng.point_in(Box::unit(2)).transpose();
  const SampleMeasure same = SampleMeasure::uniform(pts);
  const ot::SemiDiscreteProblem ps(same, same, Kernel::neg_squared_distance(Box::unit(2), Box::unit(2)));
  const ot::DualSolution ss = ot::solve_dual(ps);
  const ot::TransportAssignment as = ot::assign(ss, ps);
  double wrong = 0.0;
  for (std::size_t k = 0; k < as.target.size(); ++k) wrong += as.target[k] == k ? 0.0 : 1.0;
  out.checks.push_back(report("self_transport_value", 1, std::abs(ss.value), 1e-6));
  out.checks.push_back(report("self_transport_identity_mismatches", 1, wrong, 0.0));
  return out;
}

SuiteResult auction_identities() {
  SuiteResult out{"auction-identities", {}, {}};
  Rng rng(0xa0c7);
  double ir = 0.0;
  double ic = 0.0;
  double identity = 0.0;
  double envelope = 0.0;
  double accounting = 0.0;
  std::size_t envelope_points = 0;
  for (std::size_t t = 0; t < 100; ++t) {
    const std::size_t n = 1 + t % 3;
    const std::size_t m = 2 + rng.below(9);
    Eigen::MatrixXd alloc(m, n);
    Eigen::VectorXd prices(m);
    alloc.row(0).setZero();
    prices[0] = 0.0;
    for (Eigen::Index i = 1; i < alloc.rows(); ++i) {
      for (Eigen::Index j = 0; j < alloc.cols(); ++j) alloc(i, j) = rng.uniform01();
      prices[i] = rng.uniform(0.0, 0.5 * static_cast<double>(n));
    }
    const auction::Menu menu(alloc, prices);
    const FiniteGCF v = menu.indirect_utility_function();
    PointSet separated;
    for (int s = 0; s < 256; ++s) {
      const Point y = rng.point_in(Box::unit(n));
      const auction::Choice c = auction::choose(menu, y);
      ir = std::max(ir, -c.utility);
      for (Eigen::Index j = 0; j < alloc.rows(); ++j) {
        ic = std::max(ic, (alloc.row(j).dot(y) - prices[j]) - (c.allocation.dot(y) - c.payment));
      }
      identity = std::max(identity, std::abs(c.allocation.dot(y) - c.payment - c.utility));
      if (active_entry(v, y).margin >= 1e-3 && (y.array() > 1e-3).all() && (y.array() < 1.0 - 1e-3).all()) {
        separated.push_back(y);
      }
    }
    envelope_points += separated.size();
    if (!separated.empty()) {
      envelope = std::max(envelope, fd_gradient_check([&](const Point& y) { return auction::indirect_utility(menu, y); },
                                                      [&](const Point& y) { return auction::allocation(menu, y); },
                                                      separated)
                                        .max_rel_error);
    }
    const auction::MechanismReport rep = auction::evaluate_mechanism(menu, 2000, 17 + t);
    accounting = std::max(accounting, std::abs(rep.mean_surplus_per_item - rep.mean_profit_per_item -
                                               rep.mean_utility_per_item));
  }
  out.checks.push_back(report("individual_rationality", 25600, ir, 0.0));
  out.checks.push_back(report("incentive_compatibility", 25600, ic, 0.0));
  out.checks.push_back(report("utility_payment_identity", 25600, identity, 0.0));
  out.checks.push_back(report("envelope_gradient_fd", envelope_points, envelope, 1e-5));
  out.checks.push_back(report("revenue_accounting", 100, accounting, 1e-12));

  Eigen::MatrixXd alloc(2, 1);
  alloc << 0.0, 1.0;
  const auction::Menu posted(alloc, Eigen::Vector2d(0.0, 0.5));
  const auction::MechanismReport pr = auction::evaluate_mechanism(posted, 1000000, 2024);
  out.checks.push_back(report("posted_price_surplus", 1, std::abs(pr.mean_surplus_per_item - 0.375), 0.002));
  out.checks.push_back(report("posted_price_utility", 1, std::abs(pr.mean_utility_per_item - 0.125), 0.002));
  out.checks.push_back(report("posted_price_profit", 1, std::abs(pr.mean_profit_per_item - 0.25), 0.002));

  const auction::MechanismReport zr = auction::evaluate_mechanism(auction::Menu::zero_only(2), 1000, 5);
  out.checks.push_back(report("zero_menu_metrics", 1,
                              std::abs(zr.mean_profit_per_item) + std::abs(zr.mean_surplus_per_item) +
                                  std::abs(zr.mean_utility_per_item),
                              0.0));
  return out;
}

Json to_json(const SuiteResult& result) {
  Json checks = Json::array();
  for (const auto& c : result.checks) checks.push_back(gcx::to_json(c));
  Json j{{"suite", result.suite}, {"pass", result.pass()}, {"checks", std::move(checks)}};
  if (!result.notes.empty()) j["notes"] = result.notes;
  return j;
}

}  // namespace gcx::validate
