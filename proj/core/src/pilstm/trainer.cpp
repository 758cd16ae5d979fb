#include "teleop/pilstm/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "teleop/error.hpp"
#include "teleop/rng.hpp"

namespace teleop::pilstm {
namespace {

constexpr std::size_t kEvalChunk = 512;

}  // namespace

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
  if (!(grad_clip_threshold > 0.0)) throw ConfigError("gradient threshold must be positive");
  if (!(physics_weight >= 0.0)) throw ConfigError("physics weight must be non-negative");
  if (batch_size == 0 || epochs == 0) throw ConfigError("batch size and epochs must be positive");
  if (!(validation_fraction > 0.0 && validation_fraction < 1.0)) {
    throw ConfigError("validation fraction must lie in (0, 1)");
  }
  if (!(dt > 0.0)) throw ConfigError("sample period must be positive");
}

double dde_rhs(const FeatureRow& f, double alpha, double beta) {
  return f.xdot_delayed + beta * (f.x_delayed - f.x_p_delayed) +
         alpha * (f.xdot_delayed - f.xdot_p_delayed);
}

Batch make_batch(std::span<const Window> windows, const Scaler& scaler, double alpha,
                 double beta) {
  if (windows.empty()) throw ConfigError("empty batch");
  const auto n = static_cast<std::size_t>(windows.front().features.rows());
  const auto b = static_cast<Eigen::Index>(windows.size());
  Batch out;
  out.inputs.assign(n, Eigen::MatrixXd(4, b));
  out.targets.resize(b);
  out.physics_rhs.resize(b);
  out.pair_valid.assign(windows.size(), 0);
  for (Eigen::Index k = 0; k < b; ++k) {
    const Window& w = windows[static_cast<std::size_t>(k)];
    if (static_cast<std::size_t>(w.features.rows()) != n) {
      throw TopologyError("windows of different lengths in one batch");
    }
    for (std::size_t t = 0; t < n; ++t) {
      for (int j = 0; j < 4; ++j) {
        out.inputs[t](j, k) =
            scaler.features[static_cast<std::size_t>(j)].scale(w.features(static_cast<Eigen::Index>(t), j));
      }
    }
    out.targets[k] = scaler.target.scale(w.target);
    out.physics_rhs[k] = scaler.target_rate_scale() * dde_rhs(w.target_features, alpha, beta);
    if (k > 0) {
      out.pair_valid[static_cast<std::size_t>(k)] =
          consecutive(windows[static_cast<std::size_t>(k - 1)], w);
    }
  }
  return out;
}

double data_loss(std::span<const double> preds, std::span<const double> targets) {
  if (preds.size() != targets.size()) throw ConfigError("data_loss: length mismatch");
  if (preds.empty()) throw ConfigError("data_loss: empty batch");
  double s = 0.0;
  for (std::size_t i = 0; i < preds.size(); ++i) s += std::abs(preds[i] - targets[i]);
  return s / static_cast<double>(preds.size());
}

double physics_loss(std::span<const double> residuals) {
  if (residuals.empty()) throw ConfigError("physics_loss: no collocation points");
  double s = 0.0;
  for (double r : residuals) s += r * r;
  return s / static_cast<double>(residuals.size());
}

double total_loss(double data, double physics, double physics_weight) {
  return data + physics_weight * physics;
}

std::vector<double> dde_residuals(const Eigen::RowVectorXd& outputs, const Batch& batch,
                                  double dt) {
  std::vector<double> r;
  for (Eigen::Index b = 1; b < outputs.size(); ++b) {
    if (!batch.pair_valid[static_cast<std::size_t>(b)]) continue;
    r.push_back((outputs[b] - outputs[b - 1]) / dt - batch.physics_rhs[b]);
  }
  return r;
}

LossTerms batch_loss(const Params& params, const Batch& batch, double physics_weight, double dt,
                     Params* grad) {
  ForwardCache cache;
  const Eigen::RowVectorXd y = forward(params, batch.inputs, grad ? &cache : nullptr);
  const Eigen::Index nb = y.size();

  LossTerms terms;
  terms.data = data_loss({y.data(), static_cast<std::size_t>(nb)},
                         {batch.targets.data(), static_cast<std::size_t>(nb)});
  const auto residuals = dde_residuals(y, batch, dt);
  terms.collocation = residuals.size();
  if (!residuals.empty()) terms.physics = physics_loss(residuals);
  terms.total = total_loss(terms.data, terms.physics, physics_weight);
  if (!std::isfinite(terms.total)) throw NumericError("non-finite loss");

  if (grad) {
    Eigen::RowVectorXd dy(nb);
    for (Eigen::Index b = 0; b < nb; ++b) {
      const double e = y[b] - batch.targets[b];
      dy[b] = (e > 0.0 ? 1.0 : (e < 0.0 ? -1.0 : 0.0)) / static_cast<double>(nb);
    }
    if (!residuals.empty() && physics_weight > 0.0) {
      const double k = 2.0 * physics_weight / (static_cast<double>(residuals.size()) * dt);
      std::size_t r = 0;
      for (Eigen::Index b = 1; b < nb; ++b) {
        if (!batch.pair_valid[static_cast<std::size_t>(b)]) continue;
        dy[b] += k * residuals[r];
        dy[b - 1] -= k * residuals[r];
        ++r;
      }
    }
    backward(params, cache, dy, *grad);
  }
  return terms;
}

double clip_global_norm(Eigen::VectorXd& g, double threshold) {
  const double norm = g.norm();
  if (norm > threshold) g *= threshold / norm;
  return norm;
}

Adam::Adam(Eigen::Index size, double lr, double beta1, double beta2, double eps)
    : lr_(lr),
      beta1_(beta1),
      beta2_(beta2),
      eps_(eps),
      m_(Eigen::VectorXd::Zero(size)),
      v_(Eigen::VectorXd::Zero(size)) {}

void Adam::step(Eigen::VectorXd& theta, const Eigen::VectorXd& grad) {
  ++t_;
  m_ = beta1_ * m_ + (1.0 - beta1_) * grad;
  v_ = beta2_ * v_ + (1.0 - beta2_) * grad.cwiseAbs2();
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  theta.array() -= lr_ * (m_.array() / c1) / ((v_.array() / c2).sqrt() + eps_);
}

Evaluation evaluate(const Params& params, const Scaler& scaler, std::span<const Window> windows,
                    const TrainConfig& config) {
  Evaluation ev;
  if (windows.empty()) throw ConfigError("evaluate: no windows");
  std::vector<double> scaled;
  scaled.reserve(windows.size());
  double sq = 0.0;
  for (std::size_t start = 0; start < windows.size(); start += kEvalChunk) {
    const auto chunk = windows.subspan(start, std::min(kEvalChunk, windows.size() - start));
    const Batch b = make_batch(chunk, scaler, config.alpha, config.beta);
    const Eigen::RowVectorXd y = forward(params, b.inputs);
    for (Eigen::Index k = 0; k < y.size(); ++k) {
      scaled.push_back(y[k]);
      sq += (y[k] - b.targets[k]) * (y[k] - b.targets[k]);
    }
  }
  ev.rmse = std::sqrt(sq / static_cast<double>(windows.size()));

  double rsum = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 1; k < windows.size(); ++k) {
    if (!consecutive(windows[k - 1], windows[k])) continue;
    const double rhs =
        scaler.target_rate_scale() * dde_rhs(windows[k].target_features, config.alpha, config.beta);
    const double r = (scaled[k] - scaled[k - 1]) / config.dt - rhs;
    rsum += r * r;
    ++count;
  }
  ev.dde_residual = count ? rsum / static_cast<double>(count) : 0.0;
  ev.predictions.reserve(scaled.size());
  for (double y : scaled) ev.predictions.push_back(scaler.target.unscale(y));
  return ev;
}

TrainResult train(const Split& data, const Topology& topology, const TrainConfig& config,
                  const EpochCallback& on_epoch) {
  config.validate();
  topology.validate();
  if (data.train.empty() || data.validation.empty()) {
    throw ConfigError("training needs non-empty train and validation sets");
  }
  const Scaler scaler = Scaler::fit(data.train);

  std::vector<Batch> batches;
  for (std::size_t start = 0; start < data.train.size(); start += config.batch_size) {
    const std::size_t len = std::min(config.batch_size, data.train.size() - start);
    batches.push_back(make_batch(std::span(data.train).subspan(start, len), scaler, config.alpha,
                                 config.beta));
  }

  Params params = Params::init(topology, config.seed);
  Params grad(topology);
  Adam adam(params.flat().size(), config.learning_rate);
  auto rng = make_rng(config.seed, RngStream::kBatches);
  std::vector<std::size_t> order(batches.size());
  std::iota(order.begin(), order.end(), 0);

  TrainResult result{params, scaler, {}, 0, INFINITY};
  std::size_t since_best = 0;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(uniform(rng, 0.0, static_cast<double>(i)));
      std::swap(order[i - 1], order[std::min(j, i - 1)]);
    }
    double ld = 0.0;
    double lp = 0.0;
    for (std::size_t bi : order) {
      grad.flat().setZero();
      const LossTerms t = batch_loss(params, batches[bi], config.physics_weight, config.dt, &grad);
      if (!grad.flat().allFinite()) {
        throw NumericError("non-finite gradient in epoch " + std::to_string(epoch));
      }
      clip_global_norm(grad.flat(), config.grad_clip_threshold);
      adam.step(params.flat(), grad.flat());
      ld += t.data;
      lp += t.physics;
    }
    const Evaluation val = evaluate(params, scaler, data.validation, config);
    EpochLog log{epoch, ld / static_cast<double>(batches.size()),
                 lp / static_cast<double>(batches.size()), val.rmse, val.dde_residual};
    if (!std::isfinite(log.data_loss) || !std::isfinite(log.val_loss)) {
      throw NumericError("training diverged in epoch " + std::to_string(epoch));
    }
    result.log.push_back(log);
    if (on_epoch) on_epoch(log);
    if (log.val_loss < result.best_val_loss) {
      result.best_val_loss = log.val_loss;
      result.best_epoch = epoch;
      result.params = params;
      since_best = 0;
    } else if (++since_best >= config.patience) {
      break;
    }
  }
  return result;
}

}  // namespace teleop::pilstm
