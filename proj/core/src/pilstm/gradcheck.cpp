#include "teleop/pilstm/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace teleop::pilstm {

double relative_error(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale < 1e-12 ? 0.0 : std::abs(a - b) / scale;
}

Batch random_batch(const Topology& topology, std::size_t size, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01(0.0, 1.0);
  const auto b = static_cast<Eigen::Index>(size);
  const auto d = static_cast<Eigen::Index>(topology.feature_dim);
  Batch batch;
  for (std::size_t t = 0; t < topology.input_len; ++t) {
    batch.inputs.push_back(Eigen::MatrixXd::NullaryExpr(d, b, [&] { return n01(rng); }));
  }
  batch.targets = Eigen::RowVectorXd::NullaryExpr(b, [&] { return n01(rng); });
  batch.physics_rhs = Eigen::RowVectorXd::NullaryExpr(b, [&] { return n01(rng); });
  batch.pair_valid.assign(size, 1);
  batch.pair_valid[0] = 0;
  return batch;
}

GradCheckResult gradient_check(const GradCheckOptions& o) {
  Params params = Params::init(o.topology, o.seed);
  const Batch batch = random_batch(o.topology, o.batch, o.seed + 1);

  Params grad(o.topology);
  grad.flat().setZero();
  batch_loss(params, batch, o.physics_weight, o.dt, &grad);

  GradCheckResult r;
  const Eigen::Index n = params.flat().size();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double saved = params.flat()[i];
    params.flat()[i] = saved + o.step;
    const double up = batch_loss(params, batch, o.physics_weight, o.dt).total;
    params.flat()[i] = saved - o.step;
    const double down = batch_loss(params, batch, o.physics_weight, o.dt).total;
    params.flat()[i] = saved;

    const double num = (up - down) / (2.0 * o.step);
    r.analytic.push_back(grad.flat()[i]);
    r.numeric.push_back(num);
    const double e = relative_error(grad.flat()[i], num);
    if (e > r.max_rel_error) {
      r.max_rel_error = e;
      r.worst = static_cast<std::size_t>(i);
    }
  }
  return r;
}

}  // namespace teleop::pilstm
