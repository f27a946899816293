#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gconvex/auction.hpp"
#include "gconvex/errors.hpp"
#include "gconvex/rng.hpp"

namespace gcx::auction {

std::size_t TrainConfig::default_menu_size(std::size_t items) {
  if (items <= 1) return 8;
  if (items <= 2) return 32;
  if (items <= 5) return 128;
  if (items <= 10) return 256;
  return 512;
}

TrainConfig TrainConfig::defaults_for(std::size_t items) {
  TrainConfig c;
  c.items = items;
  c.menu_size = default_menu_size(items);
  return c;
}

TemperatureSchedule TrainConfig::schedule() const {
  if (tau_schedule.empty()) return TemperatureSchedule::geometric(100.0, 1000.0, 5);
  return TemperatureSchedule(tau_schedule);
}

void TrainConfig::validate() const {
  if (items == 0) throw InputError("items must be at least 1");
  if (menu_size < 2) throw InputError("menu_size must be at least 2 (entry 0 is the frozen opt-out)");
  if (samples == 0) throw InputError("samples must be at least 1");
  if (batch_size == 0) throw InputError("batch_size must be at least 1");
  if (eval_samples == 0) throw InputError("eval_samples must be at least 1");
  if (epochs_per_stage == 0) throw InputError("epochs_per_stage must be at least 1");
  if (!(lr_decay_per_stage > 0.0)) throw InputError("lr_decay_per_stage must be positive");
  (void)schedule();
  (void)OptState::create(Eigen::VectorXd::Zero(1), step_rule);
}

namespace {

// Parameter layout: allocations row-major (m * n), then prices (m).
Eigen::VectorXd pack(const Eigen::MatrixXd& alloc, const Eigen::VectorXd& prices) {
  const auto m = alloc.rows();
  const auto n = alloc.cols();
  Eigen::VectorXd p(m * n + m);
  for (Eigen::Index i = 0; i < m; ++i) p.segment(i * n, n) = alloc.row(i).transpose();
  p.tail(m) = prices;
  return p;
}

Menu unpack(const Eigen::VectorXd& p, std::size_t m_sz, std::size_t n_sz) {
  const auto m = static_cast<Eigen::Index>(m_sz);
  const auto n = static_cast<Eigen::Index>(n_sz);
  Eigen::MatrixXd alloc(m, n);
  for (Eigen::Index i = 0; i < m; ++i) alloc.row(i) = p.segment(i * n, n).transpose();
  return Menu(std::move(alloc), p.tail(m));
}

Eigen::VectorXd pack_gradient(const SoftRevenue& s) {
  return pack(s.grad_allocations, s.grad_prices);
}

Menu initial_menu(const TrainConfig& c, Rng& rng) {
  const auto m = static_cast<Eigen::Index>(c.menu_size);
  const auto n = static_cast<Eigen::Index>(c.items);
  Eigen::MatrixXd alloc = Eigen::MatrixXd::Zero(m, n);
  Eigen::VectorXd prices = Eigen::VectorXd::Zero(m);
  const double price_cap = 0.5 * static_cast<double>(c.items);
  for (Eigen::Index i = 1; i < m; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) alloc(i, j) = rng.uniform01();
    prices[i] = rng.uniform(0.0, price_cap);
  }
  return Menu(std::move(alloc), std::move(prices));
}

// Fisher-Yates on rows, driven by the training stream.
void shuffle_rows(Eigen::MatrixXd& rows, Rng& rng) {
  for (Eigen::Index k = rows.rows() - 1; k > 0; --k) {
    const auto j = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(k) + 1));
    if (j != k) rows.row(k).swap(rows.row(j));
  }
}

}  // namespace

TrainResult train_auction(const TrainConfig& config) {
  config.validate();
  const TemperatureSchedule schedule = config.schedule();
  const std::size_t m = config.menu_size;
  const std::size_t n = config.items;
  const Box unit = Box::unit(n);

  Rng rng(config.seed);
  Menu menu = initial_menu(config, rng);
  SampleMeasure pool = SampleMeasure::draw_uniform(unit, config.samples, rng);
  Eigen::MatrixXd pool_rows = pool.points();

  // Entry 0 (allocation row and price) is frozen; allocations are boxed.
  const auto np = static_cast<Eigen::Index>(m * n + m);
  std::vector<char> frozen(static_cast<std::size_t>(np), 0);
  std::vector<char> boxed(static_cast<std::size_t>(np), 0);
  for (std::size_t j = 0; j < n; ++j) frozen[j] = 1;
  frozen[m * n] = 1;
  for (std::size_t k = 0; k < m * n; ++k) boxed[k] = 1;
  Eigen::VectorXd box_lo = Eigen::VectorXd::Constant(np, -std::numeric_limits<double>::infinity());
  Eigen::VectorXd box_hi = Eigen::VectorXd::Constant(np, std::numeric_limits<double>::infinity());
  box_lo.head(static_cast<Eigen::Index>(m * n)).setZero();
  box_hi.head(static_cast<Eigen::Index>(m * n)).setOnes();

  OptState state = OptState::create(pack(menu.allocations(), menu.prices()), config.step_rule, frozen);

  const MechanismReport initial_report =
      evaluate_mechanism(menu, config.eval_samples, evaluation_seed(config.seed));

  TrainResult result{menu, menu, {}, 0.0, 0.0, TrainStatus::Converged, {}, {}};
  result.initial_hard_revenue = initial_report.mean_profit_per_item * static_cast<double>(n);

  const std::size_t batch = std::min(config.batch_size, config.samples);
  const std::size_t batches_per_epoch = config.samples / batch;
  const Eigen::VectorXd batch_weights =
      Eigen::VectorXd::Constant(static_cast<Eigen::Index>(batch), 1.0 / static_cast<double>(batch));

  for (std::size_t stage = 0; stage < schedule.stages(); ++stage) {
    const Temperature tau = anneal(schedule, stage);
    state.hyper.learning_rate =
        config.step_rule.learning_rate * std::pow(config.lr_decay_per_stage, static_cast<double>(stage));
    const double stage_start = soft_revenue_value(menu, pool, tau, config.threads);
    double stage_best = stage_start;
    Menu best_menu = menu;

    for (std::size_t epoch = 0; epoch < config.epochs_per_stage; ++epoch) {
      shuffle_rows(pool_rows, rng);
      for (std::size_t b = 0; b < batches_per_epoch; ++b) {
        const auto rows = pool_rows.middleRows(static_cast<Eigen::Index>(b * batch),
                                               static_cast<Eigen::Index>(batch));
        const SoftRevenue s =
            soft_revenue(menu, SampleMeasure(rows, batch_weights), tau, config.threads);
        if (!std::isfinite(s.value)) {
          throw TrainingAborted("soft revenue became non-finite at stage " + std::to_string(stage) +
                                ", epoch " + std::to_string(epoch) + ", batch " + std::to_string(b));
        }
        const Eigen::VectorXd g = pack_gradient(s);
        state = step(std::move(state), g, Sense::Maximize);
        state.parameters = project_box(std::move(state.parameters), box_lo, box_hi, boxed);
        menu = unpack(state.parameters, m, n);
        result.trace.push_back({state.steps, s.value, g.norm(), tau.tau()});
      }
      const double epoch_value = soft_revenue_value(menu, pool, tau, config.threads);
      if (!std::isfinite(epoch_value)) {
        throw TrainingAborted("soft revenue became non-finite after stage " + std::to_string(stage) +
                              ", epoch " + std::to_string(epoch));
      }
      if (epoch_value > stage_best) {
        stage_best = epoch_value;
        best_menu = menu;
      }
    }

    // Continue from the best menu of the stage; optimizer moments carry over.
    menu = best_menu;
    state.parameters = pack(menu.allocations(), menu.prices());
    if (!(stage_best > stage_start)) {
      result.status = TrainStatus::EarlyStopped;
      result.warnings.push_back("no improvement during stage " + std::to_string(stage) + " (tau " +
                                std::to_string(tau.tau()) + "); stopping early");
      break;
    }
  }

  const Temperature final_tau = anneal(schedule, schedule.stages() - 1);
  result.menu = menu;
  result.report = evaluate_mechanism(menu, config.eval_samples, evaluation_seed(config.seed), final_tau);
  result.final_hard_revenue = result.report.mean_profit_per_item * static_cast<double>(n);
  return result;
}

}  // namespace gcx::auction
