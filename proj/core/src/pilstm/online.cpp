#include "teleop/pilstm/online.hpp"

#include <cmath>

#include "teleop/error.hpp"

namespace teleop::pilstm {

double predict_window(const Model& model, const FeatureMatrix& raw) {
  const Topology& top = model.params.topology();
  if (static_cast<std::size_t>(raw.rows()) != top.input_len) {
    throw TopologyError("window length does not match the model");
  }
  SequenceBatch in(top.input_len, Eigen::MatrixXd(4, 1));
  for (std::size_t t = 0; t < top.input_len; ++t) {
    for (int j = 0; j < 4; ++j) {
      in[t](j, 0) = model.scaler.features[static_cast<std::size_t>(j)].scale(
          raw(static_cast<Eigen::Index>(t), j));
    }
  }
  return model.scaler.target.unscale(forward(model.params, in)[0]);
}

PilstmPredictor::PilstmPredictor(std::shared_ptr<const Model> model, double dt, double max_delay)
    : model_(std::move(model)),
      dt_(dt),
      history_(static_cast<std::size_t>(std::ceil(max_delay / dt)) + 1) {
  if (!model_) throw ConfigError("predictor needs a model");
  scratch_.assign(model_->params.topology().input_len, Eigen::MatrixXd(4, 1));
}

void PilstmPredictor::reset() {
  history_.clear();
  ring_.clear();
}

double PilstmPredictor::step(double x_delayed, double xdot_delayed, double delay) {
  const std::size_t lag = delay_to_lag(delay, dt_);
  if (lag > history_.capacity()) {
    throw ConfigError("delay " + std::to_string(delay) + " s exceeds predictor history capacity");
  }
  const std::size_t n = model_->params.topology().input_len;

  double x_p = x_delayed;
  if (ring_.size() == n) {
    for (std::size_t t = 0; t < n; ++t) {
      const FeatureRow& r = ring_[t];
      const double raw[4] = {r.x_delayed, r.x_p_delayed, r.xdot_delayed, r.xdot_p_delayed};
      for (std::size_t j = 0; j < 4; ++j) {
        scratch_[t](static_cast<Eigen::Index>(j), 0) = model_->scaler.features[j].scale(raw[j]);
      }
    }
    x_p = model_->scaler.target.unscale(forward(model_->params, scratch_)[0]);
  }

  if (history_.has_lag(lag)) {
    features_ = {x_delayed, history_.x_at_lag(lag), xdot_delayed, history_.xdot_at_lag(lag)};
  } else {
    features_ = {x_delayed, x_delayed, xdot_delayed, 0.0};
  }
  const double xdot_p = history_.empty() ? 0.0 : (x_p - history_.last_x()) / dt_;
  history_.push(x_p, xdot_p);
  ring_.push_back(features_);
  if (ring_.size() > n) ring_.pop_front();
  return x_p;
}

}  // namespace teleop::pilstm
