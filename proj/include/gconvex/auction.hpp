#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gconvex/finite_gcf.hpp"
#include "gconvex/gcf_io.hpp"
#include "gconvex/measure.hpp"
#include "gconvex/optim.hpp"

namespace gcx::auction {

/// Menu of (allocation, price) pairs for a single buyer with additive
/// values y in [0,1]^n. Entry 0 is the frozen opt-out (zero allocation,
/// zero price), so the indirect utility
///   v(y) = max_i { <x_i, y> - t_i }
/// is never negative.
class Menu {
 public:
  // allocations: m x n, one row per entry.
  Menu(Eigen::MatrixXd allocations, Eigen::VectorXd prices);
  static Menu zero_only(std::size_t items);

  std::size_t items() const { return static_cast<std::size_t>(allocations_.cols()); }
  std::size_t size() const { return static_cast<std::size_t>(allocations_.rows()); }
  const Eigen::MatrixXd& allocations() const { return allocations_; }
  const Eigen::VectorXd& prices() const { return prices_; }

  /// The indirect utility as a finitely X-convex function of the type:
  /// support = allocations, potentials = prices, bilinear kernel on [0,1]^n.
  FiniteGCF indirect_utility_function() const;

 private:
  Eigen::MatrixXd allocations_;
  Eigen::VectorXd prices_;
};

/// Buyer's best response (lowest index among ties).
struct Choice {
  std::size_t entry = 0;
  double utility = 0.0;
  double payment = 0.0;
  Point allocation;
};

Choice choose(const Menu& menu, const Point& type);
double indirect_utility(const Menu& menu, const Point& type);
Point allocation(const Menu& menu, const Point& type);
double payment(const Menu& menu, const Point& type);

struct SoftRevenue {
  double value = 0.0;
  Eigen::MatrixXd grad_allocations;  // m x n; row 0 is zero
  Eigen::VectorXd grad_prices;       // m; entry 0 is zero
};

/// Expected payment when the buyer picks entry i with probability
/// softmax_i(tau (<x_i, y> - t_i)), weighted by the type measure, plus its
/// exact gradient. Accumulation uses fixed 2048-row chunks, so the result
/// does not depend on `threads`.
SoftRevenue soft_revenue(const Menu& menu, const SampleMeasure& types, Temperature t,
                         std::size_t threads = 1);

/// The value part of soft_revenue only.
double soft_revenue_value(const Menu& menu, const SampleMeasure& types, Temperature t,
                          std::size_t threads = 1);

/// Expected payment with the hard argmax choice.
double hard_revenue(const Menu& menu, const SampleMeasure& types);

struct Anchor {
  Point y0;
  static Anchor origin(std::size_t items) {
    return {Point::Zero(static_cast<Eigen::Index>(items))};
  }
};

/// |v(y) - v(y0) - int_0^1 (y - y0) . grad v(y0 + s (y - y0)) ds|.
/// With a temperature, v is the LSE-smoothed indirect utility and the
/// integral uses composite 4-point Gauss-Legendre with `quadrature_points`
/// nodes (rounded up to a multiple of 4). Without one, v is the hard
/// indirect utility and the integral is taken exactly piece by piece between
/// the kinks on the segment.
double payment_integral_residual(const Menu& menu, std::optional<Temperature> t, const Point& y,
                                 const Anchor& anchor, std::size_t quadrature_points = 256);

struct MechanismReport {
  std::size_t items = 0;
  double mean_profit_per_item = 0.0;
  double mean_surplus_per_item = 0.0;
  double mean_utility_per_item = 0.0;
  double se_profit_per_item = 0.0;
  double se_surplus_per_item = 0.0;
  double se_utility_per_item = 0.0;
  // Soft revenue per item at the final temperature minus the hard revenue
  // per item, both on the evaluation sample. Zero when no temperature is
  // supplied.
  double hard_soft_gap = 0.0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
};

/// Monte Carlo means of t(y)/n, <a(y), y>/n and v(y)/n over `samples`
/// uniform types drawn with `seed`. Surplus is accumulated per sample as
/// profit + utility, which is the identity <a, y> = t + v.
MechanismReport evaluate_mechanism(const Menu& menu, std::size_t samples, std::uint64_t seed,
                                   std::optional<Temperature> final_tau = std::nullopt);
MechanismReport evaluate_mechanism(const Menu& menu, const SampleMeasure& types,
                                   std::optional<Temperature> final_tau = std::nullopt);

struct TrainConfig {
  std::size_t items = 1;
  std::size_t menu_size = 8;
  std::size_t samples = 100000;       // training pool of uniform types
  std::size_t batch_size = 1024;
  std::vector<double> tau_schedule;   // empty: geometric 100 -> 1000 over 5 stages
  std::size_t epochs_per_stage = 20;
  AdamParams step_rule{0.01, 0.9, 0.999, 1e-8};
  double lr_decay_per_stage = 0.5;
  std::size_t eval_samples = 200000;
  std::uint64_t seed = 1;
  std::size_t threads = 1;

  /// Menu size used when none is given.
  static std::size_t default_menu_size(std::size_t items);
  static TrainConfig defaults_for(std::size_t items);
  TemperatureSchedule schedule() const;
  /// Throws InputError on invalid settings (menu_size < 2, samples == 0, ...).
  void validate() const;
};

enum class TrainStatus { Converged, EarlyStopped };

struct TrainResult {
  Menu menu;
  Menu initial_menu;
  MechanismReport report;
  double initial_hard_revenue = 0.0;
  double final_hard_revenue = 0.0;
  TrainStatus status = TrainStatus::Converged;
  std::vector<std::string> warnings;
  std::vector<TraceRow> trace;
};

/// Thrown when the objective becomes NaN/Inf during training.
class TrainingAborted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Projected adaptive ascent on the soft revenue, annealing tau through
/// the schedule. The report uses hard choices on a fresh sample whose seed
/// is derived from (but distinct from) the training seed.
TrainResult train_auction(const TrainConfig& config);

/// Seed of the evaluation stream for a given training seed.
std::uint64_t evaluation_seed(std::uint64_t training_seed);

/// Posted-price summary of the purchases made on a sample: payment range
/// among buyers who pay something.
struct PostedPriceSummary {
  double median_payment = 0.0;
  double min_payment = 0.0;
  double max_payment = 0.0;
  double purchase_rate = 0.0;
};
PostedPriceSummary posted_price_summary(const Menu& menu, const SampleMeasure& types);

Json to_json(const MechanismReport& report);
Json to_json(const TrainConfig& config);
/// {items, menu: [{allocation, price}], report}
Json mechanism_json(const Menu& menu, const MechanismReport& report);
Menu menu_from_json(const Json& j);

/// Rows (y_1..y_n, v, t, a_1..a_n) over a regular lattice with `resolution`
/// points per axis on [0,1]^n; header y1,..,yn,v,t,a1,..,an.
void write_grid_csv(std::ostream& out, const Menu& menu, std::size_t resolution);

}  // namespace gcx::auction
