#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "gconvex/approx.hpp"
#include "gconvex/errors.hpp"
#include "gconvex/rng.hpp"

using namespace gcx;

namespace {

Point pt(std::initializer_list<double> v) {
  Point p(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) p[i++] = x;
  return p;
}

Kernel sum_kernel() {
  Kernel::CustomSpec spec;
  spec.name = "sum";
  spec.eval = [](const Point& x, const Point& y) { return x[0] + y[0]; };
  spec.grad_x = [](const Point&, const Point&) { return pt({1.0}); };
  spec.grad_y = [](const Point&, const Point&) { return pt({1.0}); };
  spec.lipschitz = 1.0;
  spec.affine_in_x = Kernel::AffineInX{[](const Point&) { return pt({1.0}); },
                                       [](const Point& y) { return y[0]; }};
  return Kernel::custom(Box::unit(1), Box::unit(1), spec);
}

FiniteGCF random_bilinear(Rng& rng, std::size_t n, std::size_t m) {
  const Box b = Box::unit(n);
  PointSet support;
  Eigen::VectorXd r(static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < m; ++i) {
    support.push_back(rng.point_in(b));
    r[static_cast<Eigen::Index>(i)] = rng.uniform(-0.5, 0.5);
  }
  return FiniteGCF(Kernel::bilinear(b, b), support, r);
}

}  // namespace

TEST_CASE("epsilon net in one dimension") {
  const EpsilonNet net = build_epsilon_net(Box::unit(1), 0.2, 1.0);
  CHECK(net.radius == doctest::Approx(0.1));
  REQUIRE(net.centers.size() == 5);
  const double expected[] = {0.1, 0.3, 0.5, 0.7, 0.9};
  for (std::size_t i = 0; i < 5; ++i) CHECK(net.centers[i][0] == doctest::Approx(expected[i]).epsilon(1e-14));
}

TEST_CASE("epsilon net collapses to the midpoint") {
  const Box b(pt({0.0, 2.0}), pt({1.0, 4.0}));
  const EpsilonNet net = build_epsilon_net(b, 2.0 * 1.5 * b.diameter(), 1.5);
  REQUIRE(net.centers.size() == 1);
  CHECK(net.centers[0] == b.midpoint());
}

TEST_CASE("epsilon net in two dimensions covers the box") {
  // Radius 0.1 needs cell diagonal <= 0.2, i.e. spacing <= 0.1 * sqrt(2):
  // ceil(1 / 0.1414) = 8 cells per axis.
  const EpsilonNet net = build_epsilon_net(Box::unit(2), 0.2, 1.0);
  CHECK(net.per_axis == std::vector<std::size_t>{8, 8});
  CHECK(net.centers.size() == 64);
  double worst = 0.0;
  for (const auto& p : lattice(Box::unit(2), 101)) {
    double best = 1e300;
    for (const auto& c : net.centers) best = std::min(best, (p - c).norm());
    worst = std::max(worst, best);
  }
  CHECK(worst <= net.radius + 1e-12);
}

TEST_CASE("epsilon net errors") {
  CHECK_THROWS_AS(build_epsilon_net(Box::unit(1), 0.0, 1.0), InputError);
  CHECK_THROWS_AS(build_epsilon_net(Box::unit(1), 0.1, 0.0), InputError);
  CHECK_THROWS_AS(build_epsilon_net(Box::unit(3), 1e-4, 1.0), ResourceError);
}

TEST_CASE("oracle transform") {
  const Kernel k = sum_kernel();
  const PointSet support{pt({0.0}), pt({0.5}), pt({1.0})};
  for (double x : {0.0, 0.25, 1.0}) {
    CHECK(oracle_transform(support, pt({0.0, 0.5, 1.0}), k, pt({x})) == doctest::Approx(x));
  }
  const Kernel bil = Kernel::bilinear(Box::unit(2), Box::unit(2));
  CHECK(oracle_transform({pt({0.2, 0.4})}, pt({0.1}), bil, pt({1.0, 0.5})) == doctest::Approx(0.3));
}

TEST_CASE("oracle transform shares no code with the evaluator") {
  std::ifstream in(GCONVEX_SOURCE_DIR "/src/approx.cpp");
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string src = ss.str();
  const auto begin = src.find("double oracle_transform(");
  REQUIRE(begin != std::string::npos);
  const auto end = src.find("\n}\n", begin);
  const std::string body = src.substr(begin, end - begin);
  for (const char* banned : {"gcf_eval", "inner_values", "active_entry", "FiniteGCF"}) {
    INFO(banned);
    CHECK(body.find(banned) == std::string::npos);
  }
}

TEST_CASE("LP conjugate oracle") {
  const Kernel k = sum_kernel();
  const FiniteGCF f(k, {pt({0.0}), pt({0.5}), pt({1.0})}, pt({0.0, 0.5, 1.0}));
  CHECK(lp_conjugate_oracle(f, pt({0.5})).value == doctest::Approx(0.5).epsilon(1e-12));

  Rng rng(41);
  for (std::size_t n = 1; n <= 3; ++n) {
    for (int inst = 0; inst < 10; ++inst) {
      const FiniteGCF one = random_bilinear(rng, n, 1);
      const Point y = rng.point_in(one.support_box());
      const Point y1 = one.support()[0];
      const double closed = (y - y1).cwiseMax(0.0).sum() + one.potentials()[0];
      CHECK(lp_conjugate_oracle(one, y).value == doctest::Approx(closed).epsilon(1e-12));
    }
  }

  const Box b4 = Box::unit(4);
  const FiniteGCF big(Kernel::bilinear(b4, b4), {rng.point_in(b4)}, pt({0.0}));
  CHECK_THROWS_AS(lp_conjugate_oracle(big, rng.point_in(b4)), InputError);

  Kernel::CustomSpec wavy;
  wavy.eval = [](const Point& x, const Point& y) { return x[0] * y[0] + 0.1 * std::sin(x[0]) * y[0]; };
  wavy.grad_x = [](const Point& x, const Point& y) { return pt({y[0] + 0.1 * std::cos(x[0]) * y[0]}); };
  wavy.grad_y = [](const Point& x, const Point&) { return pt({x[0] + 0.1 * std::sin(x[0])}); };
  wavy.lipschitz = 1.2;
  const Kernel wk = Kernel::custom(Box::unit(1), Box::unit(1), wavy);
  CHECK_THROWS_AS(lp_conjugate_oracle(FiniteGCF(wk, {pt({0.5})}, pt({0.0})), pt({0.2})), UnsupportedError);
}

TEST_CASE("grid conjugate agrees with the LP oracle within the grid bound") {
  Rng rng(43);
  for (std::size_t n = 1; n <= 2; ++n) {
    const PointSet grid = lattice(Box::unit(n), 33);
    const double h = 1.0 / 32.0;
    for (int inst = 0; inst < 10; ++inst) {
      const FiniteGCF f = random_bilinear(rng, n, 6);
      const FiniteGCF c = conjugate_on_grid(f, grid);
      const double bound = f.kernel().lipschitz() * h * std::sqrt(static_cast<double>(n));
      for (int s = 0; s < 10; ++s) {
        const Point y = rng.point_in(f.support_box());
        const double exact = lp_conjugate_oracle(f, y).value;
        const double approx = gcf_eval(c, y);
        CHECK(approx <= exact + 1e-12);
        CHECK(exact - approx <= bound);
      }
    }
  }
}

TEST_CASE("exact lean projection") {
  const Kernel k = sum_kernel();
  const FiniteGCF fat(k, {pt({0.0}), pt({1.0})}, pt({1.0, 1.0}));
  const FiniteGCF lean = exact_lean_project(fat);
  CHECK(lean.potentials()[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(lean.potentials()[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(exact_lean_shortfall(fat) == doctest::Approx(1.0));
  CHECK(std::abs(exact_lean_shortfall(lean)) <= 1e-12);
}

TEST_CASE("uap error") {
  Rng rng(47);
  const Box b = Box::unit(1);
  const PointSet grid = lattice(b, 513);
  PointSet support = lattice(b, 101);
  Eigen::VectorXd r(101);
  for (Eigen::Index i = 0; i < 101; ++i) r[i] = 0.5 * support[i].squaredNorm() + 0.05 * rng.uniform01();
  const FiniteGCF dense(Kernel::bilinear(b, b), support, r);

  // Own support: only the grid conjugation error remains.
  CHECK(uap_error(dense, dense.support(), grid) <= 1e-12);

  for (double eps : {0.05, 0.1, 0.2}) {
    const EpsilonNet net = build_epsilon_net(b, eps, dense.kernel().lipschitz());
    const double err = uap_error(dense, net, grid);
    CHECK(err < eps);
    CHECK(err >= 0.0);
  }

  // Nested nets: dropping centres never lowers the error.
  PointSet coarse;
  for (std::size_t i = 0; i < support.size(); i += 4) coarse.push_back(support[i]);
  PointSet coarser;
  for (std::size_t i = 0; i < support.size(); i += 20) coarser.push_back(support[i]);
  const double e_fine = uap_error(dense, coarse, grid);
  const double e_coarse = uap_error(dense, coarser, grid);
  CHECK(e_coarse >= e_fine - 1e-9);
}

TEST_CASE("finite-difference gradient check") {
  auto value = [](const Point& x) { return std::sin(x[0]) * x[1]; };
  auto grad = [](const Point& x) { return pt({std::cos(x[0]) * x[1], std::sin(x[0])}); };
  const GradCheckReport ok = fd_gradient_check(value, grad, {pt({0.3, 0.7}), pt({1.1, -0.4})});
  CHECK(ok.max_rel_error <= 1e-8);
  auto wrong = [](const Point& x) { return pt({std::cos(x[0]), std::sin(x[0])}); };
  CHECK(fd_gradient_check(value, wrong, {pt({0.3, 0.7})}).max_rel_error > 0.1);
}

TEST_CASE("gradient convergence of a constant sequence is zero") {
  Rng rng(53);
  const FiniteGCF f = random_bilinear(rng, 2, 6);
  const GradConvergenceReport rep = grad_convergence_check({f, f, f}, f, lattice(f.domain(), 21), 0.01);
  REQUIRE(rep.errors.size() == 3);
  for (double e : rep.errors) CHECK(e == 0.0);
  CHECK(rep.decreasing);
  CHECK(rep.probes_used > 0);
}

TEST_CASE("exact discrete transport") {
  // mu, eta uniform on {0, 1}, surplus xy: matching 1 to 1 gives 0.5.
  Eigen::MatrixXd s(2, 2);
  s << 0.0, 0.0, 0.0, 1.0;
  const DiscreteTransport t = exact_transport(s, pt({0.5, 0.5}), pt({0.5, 0.5}));
  CHECK(t.value == doctest::Approx(0.5));
  CHECK(t.plan(1, 1) == doctest::Approx(0.5));
  CHECK(t.plan(0, 0) == doctest::Approx(0.5));

  // Brute-force check over all 3x3 permutations.
  Rng rng(59);
  for (int inst = 0; inst < 10; ++inst) {
    Eigen::MatrixXd m(3, 3);
    for (Eigen::Index i = 0; i < 9; ++i) m(i / 3, i % 3) = rng.uniform(-1.0, 1.0);
    std::vector<int> perm{0, 1, 2};
    double best = -1e300;
    do {
      best = std::max(best, (m(0, perm[0]) + m(1, perm[1]) + m(2, perm[2])) / 3.0);
    } while (std::next_permutation(perm.begin(), perm.end()));
    const Eigen::VectorXd w = Eigen::VectorXd::Constant(3, 1.0 / 3.0);
    CHECK(exact_transport(m, w, w).value == doctest::Approx(best).epsilon(1e-12));
  }
  CHECK_THROWS_AS(exact_transport(s, pt({0.5 + 1e-7, 0.5 - 1e-7}), pt({0.5, 0.5})), UnsupportedError);
}

TEST_CASE("validation report JSON") {
  const ValidationReport r{"x", 3, 0.25, 1.0, true};
  const Json j = to_json(r);
  CHECK(j.at("check_name") == "x");
  CHECK(j.at("instances") == 3);
  CHECK(j.at("max_error") == 0.25);
  CHECK(j.at("pass") == true);
}
