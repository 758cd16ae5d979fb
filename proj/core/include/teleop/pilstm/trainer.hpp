#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "teleop/dataset.hpp"
#include "teleop/pilstm/network.hpp"
#include "teleop/pilstm/scaler.hpp"

namespace teleop::pilstm {

struct TrainConfig {
  double learning_rate = 1e-3;
  double grad_clip_threshold = 1.0;
  double physics_weight = 0.1;  ///< lambda_p
  std::size_t batch_size = 64;
  std::size_t epochs = 200;
  std::size_t patience = 30;
  std::uint64_t seed = 0;
  double validation_fraction = 0.3;
  double dt = 0.1;
  double alpha = 0.57;  ///< gains of the delay-differential residual
  double beta = 1.12;

  void validate() const;
};

/// Right-hand side x'(t-T) + beta (x(t-T) - x_p(t-T)) + alpha (x'(t-T) - x_p'(t-T)).
double dde_rhs(const FeatureRow& f, double alpha, double beta);

/// Scaled network inputs and targets for consecutive windows.
struct Batch {
  SequenceBatch inputs;
  Eigen::RowVectorXd targets;
  Eigen::RowVectorXd physics_rhs;        ///< dde_rhs of the target row, in scaled units
  std::vector<std::uint8_t> pair_valid;  ///< [b]: window b directly follows b-1
};

Batch make_batch(std::span<const Window> windows, const Scaler& scaler, double alpha, double beta);

/// Mean absolute error. Throws ConfigError on empty or mismatched input.
double data_loss(std::span<const double> preds, std::span<const double> targets);

/// Mean squared residual. Throws ConfigError when there are no collocation points.
double physics_loss(std::span<const double> residuals);

double total_loss(double data, double physics, double physics_weight);

/// (y_b - y_{b-1}) / dt - F_b for every valid pair, in batch order.
std::vector<double> dde_residuals(const Eigen::RowVectorXd& outputs, const Batch& batch, double dt);

struct LossTerms {
  double data = 0.0;
  double physics = 0.0;  ///< 0 when the batch has no collocation pair
  double total = 0.0;
  std::size_t collocation = 0;
};

/// Loss of `params` on `batch`; when `grad` is given the exact gradient of
/// the total loss is added to it (no clipping).
LossTerms batch_loss(const Params& params, const Batch& batch, double physics_weight, double dt,
                     Params* grad = nullptr);

/// Rescales g to norm `threshold` when it is longer. Returns the norm before clipping.
double clip_global_norm(Eigen::VectorXd& g, double threshold);

class Adam {
 public:
  Adam(Eigen::Index size, double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);
  void step(Eigen::VectorXd& theta, const Eigen::VectorXd& grad);

 private:
  double lr_, beta1_, beta2_, eps_;
  Eigen::VectorXd m_, v_;
  long t_ = 0;
};

struct Evaluation {
  double rmse = 0.0;          ///< scaled units
  double dde_residual = 0.0;  ///< mean squared residual, scaled units
  std::vector<double> predictions;  ///< unscaled
};

Evaluation evaluate(const Params& params, const Scaler& scaler, std::span<const Window> windows,
                    const TrainConfig& config);

struct EpochLog {
  std::size_t epoch = 0;
  double data_loss = 0.0;
  double physics_loss = 0.0;
  double val_loss = 0.0;
  double val_residual = 0.0;
};

struct TrainResult {
  Params params;
  Scaler scaler;
  std::vector<EpochLog> log;
  std::size_t best_epoch = 0;
  double best_val_loss = 0.0;
};

using EpochCallback = std::function<void(const EpochLog&)>;

/// Mini-batch Adam on the total loss; returns the parameters of the epoch
/// with the lowest validation RMSE. Throws NumericError on divergence.
TrainResult train(const Split& data, const Topology& topology, const TrainConfig& config,
                  const EpochCallback& on_epoch = {});

}  // namespace teleop::pilstm
