#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>
#include <vector>

#include "gconvex/errors.hpp"
#include "gconvex/optim.hpp"
#include "gconvex/parallel.hpp"
#include "gconvex/rng.hpp"

using namespace gcx;

TEST_CASE("zero gradient leaves parameters unchanged") {
  const Eigen::VectorXd p = Eigen::VectorXd::LinSpaced(4, -1.0, 1.0);
  OptState s = OptState::create(p, AdamParams{0.1});
  for (int i = 0; i < 5; ++i) s = step(s, Eigen::VectorXd::Zero(4), Sense::Minimize);
  CHECK(s.parameters == p);
}

TEST_CASE("quadratic bowl") {
  Rng rng(127);
  for (int inst = 0; inst < 5; ++inst) {
    Eigen::VectorXd target(6), start(6);
    for (Eigen::Index i = 0; i < 6; ++i) {
      target[i] = rng.uniform(-1.0, 1.0);
      start[i] = rng.uniform(-1.0, 1.0);
    }
    OptState s = OptState::create(start, AdamParams{0.05});
    for (int it = 0; it < 500; ++it) s = step(s, 2.0 * (s.parameters - target), Sense::Minimize);
    CHECK((s.parameters - target).norm() <= 1e-3);
  }
}

TEST_CASE("maximize climbs") {
  OptState s = OptState::create(Eigen::VectorXd::Zero(1), AdamParams{0.01});
  s = step(s, Eigen::VectorXd::Ones(1), Sense::Maximize);
  CHECK(s.parameters[0] > 0.0);
}

TEST_CASE("frozen coordinates never move") {
  Rng rng(131);
  OptState s = OptState::create(Eigen::VectorXd::Constant(3, 0.25), AdamParams{0.1}, {1, 0, 0});
  for (int it = 0; it < 100; ++it) {
    Eigen::VectorXd g(3);
    for (Eigen::Index i = 0; i < 3; ++i) g[i] = rng.uniform(-1.0, 1.0);
    s = step(s, g, Sense::Minimize);
  }
  CHECK(s.parameters[0] == 0.25);
  CHECK(s.parameters[1] != 0.25);
  CHECK(s.second_moment.minCoeff() >= 0.0);
}

TEST_CASE("non-finite gradient names the index") {
  OptState s = OptState::create(Eigen::VectorXd::Zero(3), AdamParams{});
  Eigen::VectorXd g = Eigen::VectorXd::Zero(3);
  g[2] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_WITH_AS(step(s, g, Sense::Minimize), doctest::Contains("2"), NumericalError);
  CHECK_THROWS_AS(step(s, Eigen::VectorXd::Zero(2), Sense::Minimize), InputError);
}

TEST_CASE("identical inputs give identical trajectories") {
  auto run = [] {
    Rng rng(137);
    OptState s = OptState::create(Eigen::VectorXd::Zero(5), AdamParams{0.02});
    for (int it = 0; it < 200; ++it) {
      Eigen::VectorXd g(5);
      for (Eigen::Index i = 0; i < 5; ++i) g[i] = rng.uniform(-1.0, 1.0);
      s = step(s, g, Sense::Maximize);
    }
    return s.parameters;
  };
  const Eigen::VectorXd a = run();
  const Eigen::VectorXd b = run();
  CHECK(std::memcmp(a.data(), b.data(), sizeof(double) * 5) == 0);
}

TEST_CASE("box projection") {
  const Eigen::VectorXd lo = Eigen::VectorXd::Zero(3);
  const Eigen::VectorXd hi = Eigen::VectorXd::Ones(3);
  Eigen::VectorXd in(3);
  in << 0.2, 0.5, 0.9;
  CHECK(project_box(in, lo, hi) == in);
  Eigen::VectorXd out(3);
  out << 1.7, -0.3, 0.5;
  const Eigen::VectorXd p = project_box(out, lo, hi);
  CHECK(p[0] == 1.0);
  CHECK(p[1] == 0.0);
  CHECK(project_box(p, lo, hi) == p);
  const Eigen::VectorXd masked = project_box(out, lo, hi, {0, 1, 1});
  CHECK(masked[0] == 1.7);
  CHECK(masked[1] == 0.0);

  Rng rng(139);
  for (int s = 0; s < 100; ++s) {
    Eigen::VectorXd v(3);
    for (Eigen::Index i = 0; i < 3; ++i) v[i] = rng.uniform(-2.0, 2.0);
    const Eigen::VectorXd once = project_box(v, lo, hi);
    CHECK(project_box(once, lo, hi) == once);
  }
}

TEST_CASE("temperature schedules") {
  const TemperatureSchedule g = TemperatureSchedule::geometric(10.0, 1000.0, 5);
  const double expected[] = {10.0, 31.6, 100.0, 316.0, 1000.0};
  for (std::size_t s = 0; s < 5; ++s) CHECK(anneal(g, s).tau() == doctest::Approx(expected[s]).epsilon(0.01));
  CHECK(std::log(1024.0) / anneal(g, 4).tau() <= 0.007);

  const TemperatureSchedule one = TemperatureSchedule::geometric(50.0, 50.0, 1);
  CHECK(one.stages() == 1);
  CHECK(anneal(one, 0).tau() == 50.0);
  CHECK_THROWS(anneal(one, 1));
  CHECK_THROWS(TemperatureSchedule({10.0, 10.0}));
  CHECK_THROWS(TemperatureSchedule({}));
}

TEST_CASE("averaged subgradient on |x - 1|") {
  AveragedSubgradient opt(Eigen::VectorXd::Zero(1), 0.5);
  for (int t = 0; t < 5000; ++t) {
    Eigen::VectorXd g(1);
    g[0] = opt.iterate()[0] > 1.0 ? 1.0 : -1.0;
    opt.step(g);
  }
  CHECK(opt.steps() == 5000);
  CHECK(std::abs(opt.average()[0] - 1.0) < 0.05);
}

TEST_CASE("trace CSV") {
  std::ostringstream out;
  write_trace_csv(out, {{1, 0.5, 0.1, 10.0}, {2, 0.25, 0.05, 10.0}});
  const std::string s = out.str();
  CHECK(s.rfind("step,objective,grad_norm,tau\n", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') == 3);
}

TEST_CASE("chunked loops cover every index once for any thread count") {
  for (std::size_t threads : {1, 2, 7}) {
    std::vector<int> hits(1000, 0);
    for_each_chunk(1000, 64, threads, [&](std::size_t, std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) ++hits[i];
    });
    CHECK(std::count(hits.begin(), hits.end(), 1) == 1000);
  }
  CHECK(chunk_count(1000, 64) == 16);
}
