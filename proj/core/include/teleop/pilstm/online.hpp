#pragma once

#include <deque>
#include <memory>

#include "teleop/pilstm/checkpoint.hpp"
#include "teleop/predictor.hpp"

namespace teleop::pilstm {

/// Scales a raw n x 4 window, runs the network and unscales the output.
double predict_window(const Model& model, const FeatureMatrix& raw);

/// Closed-loop use of a trained model. Each tick predicts from the previous
/// n feature rows, then appends the current row, whose predicted-history
/// features come from the model's own past outputs.
class PilstmPredictor final : public Predictor {
 public:
  explicit PilstmPredictor(std::shared_ptr<const Model> model, double dt = 0.1,
                           double max_delay = 2.5);

  double step(double x_delayed, double xdot_delayed, double delay) override;
  void reset() override;

  const Model& model() const { return *model_; }

 private:
  std::shared_ptr<const Model> model_;
  double dt_;
  PredictionHistory history_;
  std::deque<FeatureRow> ring_;
  SequenceBatch scratch_;
};

}  // namespace teleop::pilstm
