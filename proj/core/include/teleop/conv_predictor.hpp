#pragma once

#include "teleop/predictor.hpp"

namespace teleop {

/// Model-free predictor
///   x_p'(t) = x'(t-T) + beta [x(t-T) - x_p(t-T)] + alpha [x'(t-T) - x_p'(t-T)]
/// integrated with forward Euler on the sample grid.
struct ConvPredictorParams {
  double alpha = 0.57;
  double beta = 1.12;
  double dt = 0.1;
  double max_delay = 2.5;  ///< sizes the history ring

  static ConvPredictorParams forward() { return {0.57, 1.12}; }
  static ConvPredictorParams backward() { return {0.64, 0.91}; }

  std::size_t history_capacity() const;
  void validate() const;
};

/// One predictor update against `history` (which must hold x_p up to the
/// previous tick). Passes x_delayed through while the history is shorter
/// than the lag. Pushes the new (x_p, x_p_dot) and returns x_p.
/// Throws ConfigError when the lag exceeds the history capacity.
double conv_step(const ConvPredictorParams& params, PredictionHistory& history, double x_delayed,
                 double xdot_delayed, double delay, FeatureRow* features = nullptr);

class ConvPredictor final : public Predictor {
 public:
  explicit ConvPredictor(ConvPredictorParams params);

  double step(double x_delayed, double xdot_delayed, double delay) override;
  void reset() override { history_.clear(); }

  const ConvPredictorParams& params() const { return params_; }

 private:
  ConvPredictorParams params_;
  PredictionHistory history_;
};

}  // namespace teleop
