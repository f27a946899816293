#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <vector>

#include <Eigen/Core>

#include "gconvex/finite_gcf.hpp"

namespace gcx {

enum class Sense { Maximize, Minimize };

/// Adaptive moment-estimate step rule (bias-corrected first and second
/// moments) with a frozen-coordinate mask.
struct AdamParams {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct OptState {
  Eigen::VectorXd parameters;
  Eigen::VectorXd first_moment;
  Eigen::VectorXd second_moment;
  std::uint64_t steps = 0;
  AdamParams hyper;
  // frozen[i] != 0: coordinate i never moves.
  std::vector<char> frozen;

  static OptState create(Eigen::VectorXd parameters, AdamParams hyper, std::vector<char> frozen = {});
};

/// One adaptive step along +gradient (Maximize) or -gradient (Minimize).
/// Throws NumericalError naming the first non-finite gradient index.
OptState step(OptState state, const Eigen::VectorXd& gradient, Sense sense);

/// Clamp the coordinates with mask[i] != 0 into [lower[i], upper[i]].
/// An empty mask clamps every coordinate.
Eigen::VectorXd project_box(Eigen::VectorXd parameters, const Eigen::VectorXd& lower,
                            const Eigen::VectorXd& upper, const std::vector<char>& mask = {});

/// Strictly increasing sequence of temperatures, one per annealing stage.
class TemperatureSchedule {
 public:
  explicit TemperatureSchedule(std::vector<double> taus);
  // start * (end / start)^(s / (stages - 1)), s = 0..stages-1.
  static TemperatureSchedule geometric(double start, double end, std::size_t stages);

  std::size_t stages() const { return taus_.size(); }
  const std::vector<double>& taus() const { return taus_; }

 private:
  std::vector<double> taus_;
};

Temperature anneal(const TemperatureSchedule& schedule, std::size_t stage);

/// Diminishing-step subgradient method with running iterate averaging:
/// x_{t+1} = x_t - (c / sqrt(t+1)) g_t, average = mean of x_1..x_t.
class AveragedSubgradient {
 public:
  AveragedSubgradient(Eigen::VectorXd start, double step_scale);

  void step(const Eigen::VectorXd& subgradient);
  const Eigen::VectorXd& iterate() const { return iterate_; }
  const Eigen::VectorXd& average() const { return average_; }
  std::uint64_t steps() const { return steps_; }

 private:
  Eigen::VectorXd iterate_;
  Eigen::VectorXd average_;
  double step_scale_;
  std::uint64_t steps_ = 0;
};

struct TraceRow {
  std::uint64_t step = 0;
  double objective = 0.0;
  double grad_norm = 0.0;
  double tau = 0.0;
};

/// CSV with header step,objective,grad_norm,tau.
void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace);

}  // namespace gcx
