#include "teleop/conv_predictor.hpp"

#include <cmath>

#include "teleop/error.hpp"

namespace teleop {

std::size_t ConvPredictorParams::history_capacity() const {
  return static_cast<std::size_t>(std::ceil(max_delay / dt)) + 1;
}

void ConvPredictorParams::validate() const {
  if (!(dt > 0.0)) throw ConfigError("predictor dt must be positive");
  if (!(max_delay > 0.0)) throw ConfigError("predictor max_delay must be positive");
  if (!std::isfinite(alpha) || !std::isfinite(beta)) throw ConfigError("predictor gains not finite");
}

double conv_step(const ConvPredictorParams& params, PredictionHistory& history, double x_delayed,
                 double xdot_delayed, double delay, FeatureRow* features) {
  const std::size_t lag = delay_to_lag(delay, params.dt);
  if (lag > history.capacity()) {
    throw ConfigError("delay " + std::to_string(delay) + " s exceeds predictor history capacity");
  }

  if (!history.has_lag(lag)) {
    if (features) *features = {x_delayed, x_delayed, xdot_delayed, 0.0};
    history.push(x_delayed, 0.0);
    return x_delayed;
  }

  const double xp_del = history.x_at_lag(lag);
  const double xpdot_del = history.xdot_at_lag(lag);
  if (features) *features = {x_delayed, xp_del, xdot_delayed, xpdot_del};

  const double xpdot = xdot_delayed + params.beta * (x_delayed - xp_del) +
                       params.alpha * (xdot_delayed - xpdot_del);
  const double xp = history.last_x() + params.dt * xpdot;
  history.push(xp, xpdot);
  return xp;
}

ConvPredictor::ConvPredictor(ConvPredictorParams params)
    : params_(params), history_(params.history_capacity()) {
  params_.validate();
}

double ConvPredictor::step(double x_delayed, double xdot_delayed, double delay) {
  return conv_step(params_, history_, x_delayed, xdot_delayed, delay, &features_);
}

}  // namespace teleop
