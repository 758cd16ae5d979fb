#include "teleop/predictor.hpp"

#include <algorithm>
#include <cmath>

#include "teleop/error.hpp"

namespace teleop {

double BackwardDifference::step(double x) {
  const double d = primed_ ? (x - prev_) / dt_ : 0.0;
  prev_ = x;
  primed_ = true;
  return d;
}

std::vector<double> estimate_derivative(std::span<const double> samples, double dt) {
  std::vector<double> out;
  out.reserve(samples.size());
  BackwardDifference diff(dt);
  for (double s : samples) out.push_back(diff.step(s));
  return out;
}

PredictionHistory::PredictionHistory(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw ConfigError("prediction history needs a positive capacity");
}

void PredictionHistory::push(double x_p, double xdot_p) {
  entries_.push_back({x_p, xdot_p});
  if (entries_.size() > capacity_) entries_.pop_front();
}

std::size_t delay_to_lag(double delay, double dt) {
  if (!std::isfinite(delay) || delay < 0.0) throw ConfigError("delay must be finite and >= 0");
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(delay / dt)));
}

}  // namespace teleop
