#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>

#include "gconvex/auction.hpp"
#include "gconvex/errors.hpp"

using namespace gcx;
using namespace gcx::auction;

namespace {

Menu posted_price(double price) {
  Eigen::MatrixXd x(2, 1);
  x << 0.0, 1.0;
  Eigen::VectorXd t(2);
  t << 0.0, price;
  return Menu(x, t);
}

Menu random_menu(Rng& rng, std::size_t m, std::size_t n) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  Eigen::VectorXd t(static_cast<Eigen::Index>(m));
  x.row(0).setZero();
  t[0] = 0.0;
  for (Eigen::Index i = 1; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = rng.uniform01();
    t[i] = rng.uniform(0.0, 0.5 * static_cast<double>(n));
  }
  return Menu(x, t);
}

}  // namespace

TEST_CASE("posted price menu") {
  const Menu menu = posted_price(0.5);
  const Point hi = Point::Constant(1, 0.7);
  CHECK(indirect_utility(menu, hi) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(allocation(menu, hi)[0] == 1.0);
  CHECK(payment(menu, hi) == 0.5);
  const Point lo = Point::Constant(1, 0.3);
  CHECK(indirect_utility(menu, lo) == 0.0);
  CHECK(allocation(menu, lo)[0] == 0.0);
  CHECK(payment(menu, lo) == 0.0);
}

TEST_CASE("menu validation") {
  Eigen::MatrixXd x(2, 1);
  x << 0.2, 1.0;
  CHECK_THROWS_AS(Menu(x, Eigen::Vector2d(0.0, 0.5)), InputError);
  x << 0.0, 1.5;
  CHECK_THROWS_AS(Menu(x, Eigen::Vector2d(0.0, 0.5)), InputError);
  TrainConfig cfg;
  cfg.menu_size = 1;
  CHECK_THROWS_AS(cfg.validate(), InputError);
  cfg = TrainConfig{};
  cfg.tau_schedule = {10.0, 5.0};
  CHECK_THROWS(cfg.validate());
}

TEST_CASE("utility identity and individual rationality") {
  Rng rng(83);
  for (int inst = 0; inst < 20; ++inst) {
    const Menu menu = random_menu(rng, 6, 3);
    for (int s = 0; s < 100; ++s) {
      const Point y = rng.point_in(Box::unit(3));
      const Choice c = choose(menu, y);
      CHECK(c.allocation.dot(y) - c.payment - c.utility == 0.0);
      CHECK(c.utility >= 0.0);
      for (std::size_t j = 0; j < menu.size(); ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        CHECK(c.utility >= menu.allocations().row(jj).dot(y) - menu.prices()[jj]);
      }
    }
  }
}

TEST_CASE("zero-only menu earns nothing") {
  const Menu menu = Menu::zero_only(2);
  Rng rng(89);
  const SampleMeasure types = SampleMeasure::draw_uniform(Box::unit(2), 100, rng);
  const SoftRevenue s = soft_revenue(menu, types, Temperature(10.0));
  CHECK(s.value == 0.0);
  CHECK(s.grad_prices.cwiseAbs().maxCoeff() == 0.0);
  CHECK(s.grad_allocations.cwiseAbs().maxCoeff() == 0.0);
  const MechanismReport r = evaluate_mechanism(menu, 1000, 1);
  CHECK(r.mean_profit_per_item == 0.0);
  CHECK(r.mean_surplus_per_item == 0.0);
  CHECK(r.mean_utility_per_item == 0.0);
}

TEST_CASE("soft revenue approaches hard revenue") {
  Rng rng(97);
  const Menu menu = random_menu(rng, 8, 2);
  const SampleMeasure types = SampleMeasure::draw_uniform(Box::unit(2), 2000, rng);
  const double hard = hard_revenue(menu, types);
  const double loose = std::abs(soft_revenue_value(menu, types, Temperature(10.0)) - hard);
  const double tight = std::abs(soft_revenue_value(menu, types, Temperature(1e4)) - hard);
  CHECK(tight < loose);
  CHECK(tight < 5e-3);
}

TEST_CASE("soft revenue gradient matches finite differences") {
  Rng rng(101);
  const Menu menu = random_menu(rng, 4, 2);
  const SampleMeasure types = SampleMeasure::draw_uniform(Box::unit(2), 64, rng);
  const Temperature tau(5.0);
  const SoftRevenue s = soft_revenue(menu, types, tau);
  const double h = 1e-6;
  for (Eigen::Index i = 1; i < 4; ++i) {
    Eigen::VectorXd tp = menu.prices(), tm = menu.prices();
    tp[i] += h;
    tm[i] -= h;
    const double fd = (soft_revenue_value(Menu(menu.allocations(), tp), types, tau) -
                       soft_revenue_value(Menu(menu.allocations(), tm), types, tau)) /
                      (2 * h);
    CHECK(std::abs(fd - s.grad_prices[i]) / std::max(1.0, std::abs(s.grad_prices[i])) <= 1e-5);
  }
  CHECK(s.grad_prices[0] == 0.0);
  CHECK(s.grad_allocations.row(0).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("soft revenue does not depend on the thread count") {
  Rng rng(103);
  const Menu menu = random_menu(rng, 16, 3);
  const SampleMeasure types = SampleMeasure::draw_uniform(Box::unit(3), 10000, rng);
  const SoftRevenue one = soft_revenue(menu, types, Temperature(100.0), 1);
  const SoftRevenue four = soft_revenue(menu, types, Temperature(100.0), 4);
  CHECK(one.value == four.value);
  CHECK(one.grad_prices == four.grad_prices);
  CHECK(one.grad_allocations == four.grad_allocations);
}

TEST_CASE("payment integral residual") {
  Rng rng(107);
  const Menu menu = random_menu(rng, 5, 2);
  const Point y = rng.point_in(Box::unit(2));
  const Anchor origin = Anchor::origin(2);
  CHECK(payment_integral_residual(menu, Temperature(50.0), origin.y0, origin) == 0.0);
  CHECK(payment_integral_residual(menu, Temperature(50.0), y, origin) <= 1e-4);
  // Posted price: the segment from 0 to 1 crosses the kink at 0.5.
  const Menu pp = posted_price(0.5);
  CHECK(payment_integral_residual(pp, std::nullopt, Point::Constant(1, 1.0), Anchor::origin(1)) <= 1e-6);
}

TEST_CASE("posted price report matches closed-form integrals") {
  const MechanismReport r = evaluate_mechanism(posted_price(0.5), 1000000, 5);
  CHECK(std::abs(r.mean_profit_per_item - 0.25) <= 0.002);
  CHECK(std::abs(r.mean_surplus_per_item - 0.375) <= 0.002);
  CHECK(std::abs(r.mean_utility_per_item - 0.125) <= 0.002);
  CHECK(r.se_profit_per_item > 0.0);
  CHECK(r.samples == 1000000);
}

TEST_CASE("posted price summary") {
  Rng rng(109);
  const SampleMeasure types = SampleMeasure::draw_uniform(Box::unit(1), 1000, rng);
  const PostedPriceSummary s = posted_price_summary(posted_price(0.4), types);
  CHECK(s.min_payment == 0.4);
  CHECK(s.max_payment == 0.4);
  CHECK(s.purchase_rate == doctest::Approx(0.6).epsilon(0.1));
}

TEST_CASE("mechanism JSON round trip") {
  Rng rng(113);
  const Menu menu = random_menu(rng, 5, 2);
  const MechanismReport r = evaluate_mechanism(menu, 1000, 3);
  const Json j = mechanism_json(menu, r);
  CHECK(j.at("items") == 2);
  const Menu back = menu_from_json(Json::parse(j.dump()));
  CHECK(back.allocations() == menu.allocations());
  CHECK(back.prices() == menu.prices());
  CHECK(mechanism_json(back, r).dump() == j.dump());
}

TEST_CASE("grid export") {
  std::ostringstream out;
  write_grid_csv(out, posted_price(0.5), 5);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "y1,v,t,a1");
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 5);
}

TEST_CASE("small training run is deterministic and improves revenue") {
  TrainConfig cfg = TrainConfig::defaults_for(2);
  cfg.samples = 4096;
  cfg.epochs_per_stage = 3;
  cfg.eval_samples = 5000;
  cfg.seed = 9;
  const TrainResult a = train_auction(cfg);
  cfg.threads = 3;
  const TrainResult b = train_auction(cfg);
  CHECK(mechanism_json(a.menu, a.report).dump() == mechanism_json(b.menu, b.report).dump());
  CHECK(a.final_hard_revenue >= a.initial_hard_revenue);
  CHECK(a.menu.prices()[0] == 0.0);
  CHECK(a.menu.allocations().row(0).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.menu.allocations().minCoeff() >= 0.0);
  CHECK(a.menu.allocations().maxCoeff() <= 1.0);
}
