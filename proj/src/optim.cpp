#include "gconvex/optim.hpp"

#include <cmath>
#include <iomanip>
#include <string>

#include "gconvex/errors.hpp"

namespace gcx {

OptState OptState::create(Eigen::VectorXd parameters, AdamParams hyper, std::vector<char> frozen) {
  if (!frozen.empty() && frozen.size() != static_cast<std::size_t>(parameters.size())) {
    throw InputError("OptState: frozen mask length differs from parameter count");
  }
  if (!(hyper.learning_rate > 0.0) || !(hyper.beta1 >= 0.0 && hyper.beta1 < 1.0) ||
      !(hyper.beta2 >= 0.0 && hyper.beta2 < 1.0) || !(hyper.epsilon > 0.0)) {
    throw InputError("OptState: invalid step-size hyperparameters");
  }
  OptState s;
  const auto n = parameters.size();
  s.parameters = std::move(parameters);
  s.first_moment = Eigen::VectorXd::Zero(n);
  s.second_moment = Eigen::VectorXd::Zero(n);
  s.hyper = hyper;
  s.frozen = frozen.empty() ? std::vector<char>(static_cast<std::size_t>(n), 0) : std::move(frozen);
  return s;
}

OptState step(OptState state, const Eigen::VectorXd& gradient, Sense sense) {
  if (gradient.size() != state.parameters.size()) {
    throw InputError("step: gradient length " + std::to_string(gradient.size()) +
                     " differs from parameter count " + std::to_string(state.parameters.size()));
  }
  for (Eigen::Index i = 0; i < gradient.size(); ++i) {
    if (!std::isfinite(gradient[i])) {
      throw NumericalError("step: non-finite gradient at index " + std::to_string(i));
    }
  }
  const AdamParams& h = state.hyper;
  state.steps += 1;
  const double t = static_cast<double>(state.steps);
  const double bias1 = 1.0 - std::pow(h.beta1, t);
  const double bias2 = 1.0 - std::pow(h.beta2, t);
  const double sign = sense == Sense::Maximize ? 1.0 : -1.0;
  for (Eigen::Index i = 0; i < gradient.size(); ++i) {
    if (state.frozen[static_cast<std::size_t>(i)]) continue;
    const double g = gradient[i];
    state.first_moment[i] = h.beta1 * state.first_moment[i] + (1.0 - h.beta1) * g;
    state.second_moment[i] = h.beta2 * state.second_moment[i] + (1.0 - h.beta2) * g * g;
    const double mhat = state.first_moment[i] / bias1;
    const double vhat = state.second_moment[i] / bias2;
    state.parameters[i] += sign * h.learning_rate * mhat / (std::sqrt(vhat) + h.epsilon);
  }
  return state;
}

Eigen::VectorXd project_box(Eigen::VectorXd parameters, const Eigen::VectorXd& lower,
                            const Eigen::VectorXd& upper, const std::vector<char>& mask) {
  if (lower.size() != parameters.size() || upper.size() != parameters.size()) {
    throw InputError("project_box: bound lengths differ from parameter count");
  }
  if (!mask.empty() && mask.size() != static_cast<std::size_t>(parameters.size())) {
    throw InputError("project_box: mask length differs from parameter count");
  }
  for (Eigen::Index i = 0; i < parameters.size(); ++i) {
    if (!(lower[i] <= upper[i])) throw InputError("project_box: lower > upper at " + std::to_string(i));
    if (!mask.empty() && !mask[static_cast<std::size_t>(i)]) continue;
    parameters[i] = std::min(std::max(parameters[i], lower[i]), upper[i]);
  }
  return parameters;
}

TemperatureSchedule::TemperatureSchedule(std::vector<double> taus) : taus_(std::move(taus)) {
  if (taus_.empty()) throw InputError("temperature schedule is empty");
  for (std::size_t s = 0; s < taus_.size(); ++s) {
    if (!(taus_[s] > 0.0) || !std::isfinite(taus_[s])) {
      throw InputError("temperature schedule: entries must be positive and finite");
    }
    if (s > 0 && !(taus_[s] > taus_[s - 1])) {
      throw InputError("temperature schedule must be strictly increasing");
    }
  }
}

TemperatureSchedule TemperatureSchedule::geometric(double start, double end, std::size_t stages) {
  if (stages == 0) throw InputError("geometric schedule needs at least one stage");
  if (stages == 1) return TemperatureSchedule({start});
  std::vector<double> taus(stages);
  const double ratio = std::log(end / start);
  for (std::size_t s = 0; s < stages; ++s) {
    taus[s] = start * std::exp(ratio * static_cast<double>(s) / static_cast<double>(stages - 1));
  }
  taus.back() = end;
  return TemperatureSchedule(std::move(taus));
}

Temperature anneal(const TemperatureSchedule& schedule, std::size_t stage) {
  if (stage >= schedule.stages()) {
    throw InputError("anneal: stage " + std::to_string(stage) + " beyond schedule of " +
                     std::to_string(schedule.stages()));
  }
  return Temperature(schedule.taus()[stage]);
}

AveragedSubgradient::AveragedSubgradient(Eigen::VectorXd start, double step_scale)
    : iterate_(std::move(start)), average_(iterate_), step_scale_(step_scale) {
  if (!(step_scale > 0.0)) throw InputError("subgradient step scale must be positive");
}

void AveragedSubgradient::step(const Eigen::VectorXd& subgradient) {
  if (subgradient.size() != iterate_.size()) throw InputError("subgradient has wrong length");
  steps_ += 1;
  iterate_ -= (step_scale_ / std::sqrt(static_cast<double>(steps_))) * subgradient;
  average_ += (iterate_ - average_) / static_cast<double>(steps_);
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace) {
  out << "step,objective,grad_norm,tau\n";
  out << std::setprecision(17);
  for (const auto& row : trace) {
    out << row.step << ',' << row.objective << ',' << row.grad_norm << ',' << row.tau << '\n';
  }
}

}  // namespace gcx
