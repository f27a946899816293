#include <iomanip>
#include <string>

#include "gconvex/auction.hpp"
#include "gconvex/errors.hpp"

namespace gcx::auction {

Json to_json(const MechanismReport& r) {
  return Json{{"items", r.items},
              {"mean_profit_per_item", r.mean_profit_per_item},
              {"mean_surplus_per_item", r.mean_surplus_per_item},
              {"mean_utility_per_item", r.mean_utility_per_item},
              {"se_profit_per_item", r.se_profit_per_item},
              {"se_surplus_per_item", r.se_surplus_per_item},
              {"se_utility_per_item", r.se_utility_per_item},
              {"hard_soft_gap", r.hard_soft_gap},
              {"samples", r.samples},
              {"seed", r.seed}};
}

Json to_json(const TrainConfig& c) {
  return Json{{"items", c.items},
              {"menu_size", c.menu_size},
              {"samples", c.samples},
              {"batch_size", c.batch_size},
              {"tau_schedule", c.schedule().taus()},
              {"epochs_per_stage", c.epochs_per_stage},
              {"learning_rate", c.step_rule.learning_rate},
              {"beta1", c.step_rule.beta1},
              {"beta2", c.step_rule.beta2},
              {"adam_epsilon", c.step_rule.epsilon},
              {"lr_decay_per_stage", c.lr_decay_per_stage},
              {"eval_samples", c.eval_samples},
              {"seed", c.seed}};
}

Json mechanism_json(const Menu& menu, const MechanismReport& report) {
  Json entries = Json::array();
  for (Eigen::Index i = 0; i < menu.allocations().rows(); ++i) {
    entries.push_back(Json{{"allocation", gcx::to_json(Point(menu.allocations().row(i).transpose()))},
                           {"price", menu.prices()[i]}});
  }
  return Json{{"items", menu.items()}, {"menu", std::move(entries)}, {"report", to_json(report)}};
}

Menu menu_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("items") || !j.contains("menu")) {
    throw InputError("mechanism JSON needs fields 'items' and 'menu'");
  }
  const auto n = static_cast<Eigen::Index>(j.at("items").get<std::size_t>());
  const Json& entries = j.at("menu");
  if (!entries.is_array() || entries.empty()) throw InputError("field 'menu' must be a nonempty array");
  const auto m = static_cast<Eigen::Index>(entries.size());
  Eigen::MatrixXd alloc(m, n);
  Eigen::VectorXd prices(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Json& e = entries[static_cast<std::size_t>(i)];
    if (!e.contains("allocation") || !e.contains("price")) {
      throw InputError("menu entry " + std::to_string(i) + " needs 'allocation' and 'price'");
    }
    const Point a = point_from_json(e.at("allocation"), "allocation");
    if (a.size() != n) throw InputError("menu entry " + std::to_string(i) + " has wrong item count");
    alloc.row(i) = a.transpose();
    prices[i] = e.at("price").get<double>();
  }
  return Menu(std::move(alloc), std::move(prices));
}

void write_grid_csv(std::ostream& out, const Menu& menu, std::size_t resolution) {
  const std::size_t n = menu.items();
  for (std::size_t i = 0; i < n; ++i) out << 'y' << i + 1 << ',';
  out << "v,t";
  for (std::size_t i = 0; i < n; ++i) out << ",a" << i + 1;
  out << '\n' << std::setprecision(17);
  for (const Point& y : lattice(Box::unit(n), resolution)) {
    const Choice c = choose(menu, y);
    for (Eigen::Index i = 0; i < y.size(); ++i) out << y[i] << ',';
    out << c.utility << ',' << c.payment;
    for (Eigen::Index i = 0; i < c.allocation.size(); ++i) out << ',' << c.allocation[i];
    out << '\n';
  }
}

}  // namespace gcx::auction
