#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gconvex/approx.hpp"
#include "gconvex/errors.hpp"
#include "gconvex/ot_dual.hpp"

using namespace gcx;
using namespace gcx::ot;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd p(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) p[i++] = x;
  return p;
}

SampleMeasure two_points() {
  Eigen::MatrixXd pts(2, 1);
  pts << 0.0, 1.0;
  return SampleMeasure::uniform(pts);
}

SemiDiscreteProblem two_by_two() {
  return SemiDiscreteProblem(two_points(), two_points(), Kernel::bilinear(Box::unit(1), Box::unit(1)));
}

SampleMeasure random_measure(Rng& rng, std::size_t count, std::size_t dim) {
  Eigen::MatrixXd pts(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < pts.size(); ++i) pts.data()[i] = rng.uniform01();
  return SampleMeasure::uniform(pts);
}

}  // namespace

TEST_CASE("measure validation") {
  Eigen::MatrixXd pts(2, 1);
  pts << 0.0, 1.0;
  CHECK_THROWS_AS(SampleMeasure(pts, vec({0.5, 0.6})), InputError);
  CHECK_THROWS_AS(SampleMeasure(pts, vec({1.5, -0.5})), InputError);
  CHECK_THROWS_AS(SampleMeasure(pts, vec({1.0})), InputError);
  CHECK_NOTHROW(SampleMeasure(pts, vec({0.25, 0.75})));
}

TEST_CASE("2x2 instance") {
  const SemiDiscreteProblem p = two_by_two();
  const DualSolution sol = solve_dual(p);
  CHECK(sol.converged);
  CHECK(std::abs(sol.value - 0.5) <= 1e-6);
  const TransportAssignment a = assign(sol, p);
  CHECK(a.target == std::vector<std::size_t>{0, 1});
  CHECK(a.objective == doctest::Approx(0.5));
  CHECK(extract_map(sol, Point::Constant(1, 0.0)) == 0);
  CHECK(extract_map(sol, Point::Constant(1, 1.0)) == 1);
  // Optimal: the subgradient vanishes.
  CHECK(p.subgradient(sol.potential.potentials()).cwiseAbs().maxCoeff() <= 1e-12);
  // Trace holds the best value so far.
  for (std::size_t i = 1; i < sol.trace.size(); ++i) CHECK(sol.trace[i] <= sol.trace[i - 1]);
}

TEST_CASE("single target: objective and subgradient are gauge free") {
  Rng rng(61);
  const SampleMeasure mu = random_measure(rng, 7, 2);
  Eigen::MatrixXd y(1, 2);
  y << 0.3, 0.8;
  const SampleMeasure eta = SampleMeasure::uniform(y);
  const Kernel k = Kernel::bilinear(Box::unit(2), Box::unit(2));
  double expected = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) expected += mu.weights()[static_cast<Eigen::Index>(i)] * k.eval(mu.point(i), eta.point(0));
  for (double r : {-3.0, 0.0, 0.7, 12.5}) {
    CHECK(dual_objective(vec({r}), mu, eta, k) == doctest::Approx(expected).epsilon(1e-14));
    CHECK(std::abs(dual_subgradient(vec({r}), mu, eta, k)[0]) <= 1e-12);  // weights sum to 1 up to rounding
  }
}

TEST_CASE("constant shifts leave the objective and the map unchanged") {
  Rng rng(67);
  const Kernel k = Kernel::bilinear(Box::unit(2), Box::unit(2));
  for (int inst = 0; inst < 10; ++inst) {
    const SemiDiscreteProblem p(random_measure(rng, 8, 2), random_measure(rng, 4, 2), k);
    Eigen::VectorXd r(4);
    for (Eigen::Index i = 0; i < 4; ++i) r[i] = rng.uniform(-1.0, 1.0);
    const double c = rng.uniform(-5.0, 5.0);
    const Eigen::VectorXd shifted = (r.array() + c).matrix();
    CHECK(p.objective(shifted) == doctest::Approx(p.objective(r)).epsilon(1e-13));
    for (std::size_t s = 0; s < 8; ++s) {
      CHECK(active_entry(p.potential(r), p.mu().point(s)).index ==
            active_entry(p.potential(shifted), p.mu().point(s)).index);
    }
  }
}

TEST_CASE("objective is convex in the potentials") {
  Rng rng(71);
  const Kernel k = Kernel::neg_squared_distance(Box::unit(2), Box::unit(2));
  const SemiDiscreteProblem p(random_measure(rng, 12, 2), random_measure(rng, 5, 2), k);
  for (int s = 0; s < 200; ++s) {
    Eigen::VectorXd a(5), b(5);
    for (Eigen::Index i = 0; i < 5; ++i) {
      a[i] = rng.uniform(-1.0, 1.0);
      b[i] = rng.uniform(-1.0, 1.0);
    }
    CHECK(p.objective(0.5 * (a + b)) <= 0.5 * (p.objective(a) + p.objective(b)) + 1e-10);
  }
}

TEST_CASE("self transport under squared distance") {
  Eigen::MatrixXd pts(4, 2);
  pts << 0.1, 0.1, 0.9, 0.2, 0.4, 0.8, 0.7, 0.6;
  const SampleMeasure m = SampleMeasure::uniform(pts);
  const SemiDiscreteProblem p(m, m, Kernel::neg_squared_distance(Box::unit(2), Box::unit(2)));
  const DualSolution sol = solve_dual(p);
  CHECK(std::abs(sol.value) <= 1e-6);
  const TransportAssignment a = assign(sol, p);
  CHECK(a.target == std::vector<std::size_t>{0, 1, 2, 3});
}

TEST_CASE("extract_map follows the power diagram") {
  Rng rng(73);
  const Kernel k = Kernel::neg_squared_distance(Box::unit(2), Box::unit(2));
  const SemiDiscreteProblem p(random_measure(rng, 10, 2), random_measure(rng, 5, 2), k);
  const DualSolution sol = solve_dual(p);
  const Eigen::VectorXd r = sol.potential.potentials();
  for (int s = 0; s < 100; ++s) {
    const Point x = rng.point_in(Box::unit(2));
    std::size_t best = 0;
    double best_v = -1e300;
    for (std::size_t i = 0; i < 5; ++i) {
      const double v = -(x - p.eta().point(i)).squaredNorm() - r[static_cast<Eigen::Index>(i)];
      if (v > best_v) {
        best_v = v;
        best = i;
      }
    }
    CHECK(extract_map(sol, x) == best);
  }
}

TEST_CASE("bilinear twist: the gradient is the assigned target") {
  const SemiDiscreteProblem p = two_by_two();
  const DualSolution sol = solve_dual(p);
  for (double x : {0.05, 0.95}) {
    const Point px = Point::Constant(1, x);
    const std::size_t i = extract_map(sol, px);
    CHECK(gcf_grad(sol.potential, px) == p.eta().point(i));
  }
}

TEST_CASE("solver agrees with exact transport and stays feasible") {
  Rng rng(79);
  const Kernel k = Kernel::bilinear(Box::unit(2), Box::unit(2));
  for (int inst = 0; inst < 5; ++inst) {
    const SemiDiscreteProblem p(random_measure(rng, 4, 2), random_measure(rng, 4, 2), k);
    const DualSolution sol = solve_dual(p);
    const DiscreteTransport exact = exact_transport(p.surplus(), p.mu().weights(), p.eta().weights());
    CHECK(std::abs(sol.value - exact.value) <= 1e-6);
    const Eigen::VectorXd& r = sol.potential.potentials();
    const Eigen::VectorXd phi = p.phi_on_mu(r);
    for (Eigen::Index kx = 0; kx < p.surplus().rows(); ++kx) {
      for (Eigen::Index i = 0; i < p.surplus().cols(); ++i) CHECK((p.surplus()(kx, i) - r[i]) - phi[kx] <= 0.0);
    }
  }
}

TEST_CASE("subgradient phase only still returns a valid bound") {
  const SemiDiscreteProblem p = two_by_two();
  SolverConfig cfg;
  cfg.polish = false;
  cfg.subgradient_iterations = 50;
  const DualSolution sol = solve_dual(p, cfg);
  CHECK(sol.value >= 0.5 - 1e-12);
  CHECK(sol.iterations >= 50);
}

TEST_CASE("instance JSON") {
  const Json good = Json::parse(R"({
    "mu": {"points": [[0], [1]], "weights": [0.5, 0.5]},
    "eta": {"points": [[0], [1]], "weights": [0.5, 0.5]},
    "kernel": "bilinear"})");
  const Instance inst = instance_from_json(good);
  CHECK(inst.mu.size() == 2);
  CHECK(inst.kernel.kind() == KernelKind::Bilinear);
  const Instance back = instance_from_json(to_json(inst));
  CHECK(back.eta.points() == inst.eta.points());

  Json missing = good;
  missing["mu"].erase("weights");
  CHECK_THROWS_WITH_AS(instance_from_json(missing), "missing field 'mu.weights'", InputError);
  Json custom = good;
  custom["kernel"] = "custom";
  CHECK_THROWS_AS(instance_from_json(custom), UnsupportedError);
}

TEST_CASE("bundled instances") {
  const auto all = bundled_instances();
  REQUIRE(all.size() == 10);
  for (const auto& inst : all) {
    CHECK(inst.mu.size() <= 6);
    CHECK(inst.eta.size() <= 6);
    for (Eigen::Index i = 0; i < inst.mu.weights().size(); ++i) {
      const double k = inst.mu.weights()[i] * 12.0;
      CHECK(std::abs(k - std::round(k)) <= 1e-9);
    }
  }
}
