#include "teleop/pilstm/network.hpp"

#include <cmath>

#include "teleop/error.hpp"
#include "teleop/rng.hpp"

namespace teleop::pilstm {
namespace {

Eigen::MatrixXd sigmoid(const Eigen::MatrixXd& z) {
  return (1.0 + (-z.array()).exp()).inverse().matrix();
}

}  // namespace

void Topology::validate() const {
  if (input_len == 0 || feature_dim == 0 || dense_units == 0 || lstm_depth == 0 ||
      lstm_units == 0) {
    throw TopologyError("network dimensions must all be positive");
  }
}

std::size_t Topology::parameter_count() const {
  const std::size_t m = dense_units, l = lstm_units;
  std::size_t n = m * feature_dim + m;
  for (std::size_t j = 0; j < lstm_depth; ++j) {
    const std::size_t in = j == 0 ? m : l;
    n += 4 * l * in + 4 * l * l + 4 * l;
  }
  return n + l + 1;
}

Params::Params(Topology topology) : topology_(topology) {
  topology_.validate();
  std::size_t off = 0;
  off_w_in_ = off;
  off += m() * topology_.feature_dim;
  off_b_in_ = off;
  off += m();
  for (std::size_t j = 0; j < topology_.lstm_depth; ++j) {
    LayerOffsets lo;
    lo.w = off;
    off += 4 * l() * layer_input(j);
    lo.u = off;
    off += 4 * l() * l();
    lo.b = off;
    off += 4 * l();
    layers_.push_back(lo);
  }
  off_w_out_ = off;
  off += l();
  off_b_out_ = off;
  off += 1;
  data_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(off));
}

Params Params::init(const Topology& topology, std::uint64_t seed) {
  Params p(topology);
  auto rng = make_rng(seed, RngStream::kWeights);
  auto fill = [&](auto&& m, std::size_t fan_in) {
    const double a = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = uniform(rng, -a, a);
    }
  };
  fill(p.w_in(), topology.feature_dim);
  const auto l = static_cast<Eigen::Index>(topology.lstm_units);
  for (std::size_t j = 0; j < topology.lstm_depth; ++j) {
    fill(p.w(j), p.layer_input(j));
    fill(p.u(j), topology.lstm_units);
    p.b(j).segment(0, l).setOnes();
  }
  fill(p.w_out(), topology.lstm_units);
  return p;
}

std::vector<Params::TensorInfo> Params::tensors() const {
  std::vector<TensorInfo> out;
  out.push_back({"W_in", off_w_in_, m(), topology_.feature_dim});
  out.push_back({"b_in", off_b_in_, m(), 1});
  static const char* gates[] = {"f", "c", "i", "o"};
  for (std::size_t j = 0; j < layers_.size(); ++j) {
    const std::string sfx = layers_.size() > 1 ? std::to_string(j + 1) : "";
    for (std::size_t g = 0; g < 4; ++g) {
      out.push_back({std::string("W_") + gates[g] + sfx, layers_[j].w + g * l() * layer_input(j),
                     l(), layer_input(j)});
      out.push_back({std::string("U_") + gates[g] + sfx, layers_[j].u + g * l() * l(), l(), l()});
      out.push_back({std::string("b_") + gates[g] + sfx, layers_[j].b + g * l(), l(), 1});
    }
  }
  out.push_back({"W_out", off_w_out_, 1, l()});
  out.push_back({"b_out", off_b_out_, 1, 1});
  return out;
}

Eigen::RowVectorXd forward(const Params& params, const SequenceBatch& inputs, ForwardCache* cache) {
  const Topology& top = params.topology();
  if (inputs.size() != top.input_len) {
    throw TopologyError("sequence length " + std::to_string(inputs.size()) + " != " +
                        std::to_string(top.input_len));
  }
  const Eigen::Index batch = inputs.front().cols();
  for (const auto& x : inputs) {
    if (x.rows() != static_cast<Eigen::Index>(top.feature_dim) || x.cols() != batch) {
      throw TopologyError("input step has wrong shape");
    }
  }
  const auto n = top.input_len;
  const auto l = static_cast<Eigen::Index>(top.lstm_units);

  std::vector<Eigen::MatrixXd> dense(n);
  for (std::size_t t = 0; t < n; ++t) {
    dense[t] = ((params.w_in() * inputs[t]).colwise() + params.b_in()).array().tanh().matrix();
  }

  std::vector<LayerCache> layers(top.lstm_depth);
  const std::vector<Eigen::MatrixXd>* below = &dense;
  for (std::size_t j = 0; j < top.lstm_depth; ++j) {
    LayerCache& lc = layers[j];
    for (auto* v : {&lc.f, &lc.g, &lc.i, &lc.o, &lc.c, &lc.tanh_c, &lc.h}) v->resize(n);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(l, batch);
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(l, batch);
    const auto w = params.w(j);
    const auto u = params.u(j);
    const auto b = params.b(j);
    for (std::size_t t = 0; t < n; ++t) {
      Eigen::MatrixXd z = w * (*below)[t] + u * h;
      z.colwise() += b;
      lc.f[t] = sigmoid(z.topRows(l));
      lc.g[t] = z.middleRows(l, l).array().tanh().matrix();
      lc.i[t] = sigmoid(z.middleRows(2 * l, l));
      lc.o[t] = sigmoid(z.bottomRows(l));
      c = lc.f[t].cwiseProduct(c) + lc.i[t].cwiseProduct(lc.g[t]);
      lc.c[t] = c;
      lc.tanh_c[t] = c.array().tanh().matrix();
      h = lc.o[t].cwiseProduct(lc.tanh_c[t]);
      lc.h[t] = h;
    }
    below = &lc.h;
  }

  Eigen::RowVectorXd y = params.w_out() * layers.back().h.back();
  y.array() += params.b_out();
  if (!y.allFinite()) throw NumericError("non-finite network output");

  if (cache) {
    cache->inputs = inputs;
    cache->dense = std::move(dense);
    cache->layers = std::move(layers);
    cache->output = y;
  }
  return y;
}

void backward(const Params& params, const ForwardCache& cache, const Eigen::RowVectorXd& d_output,
              Params& grad) {
  const Topology& top = params.topology();
  if (cache.output.size() != d_output.size() || cache.layers.size() != top.lstm_depth ||
      cache.inputs.size() != top.input_len || !(grad.topology() == top)) {
    throw TopologyError("backward: cache does not match the batch");
  }
  const auto n = top.input_len;
  const auto l = static_cast<Eigen::Index>(top.lstm_units);
  const Eigen::Index batch = d_output.size();

  const auto& h_last = cache.layers.back().h.back();
  grad.w_out() += d_output * h_last.transpose();
  grad.b_out() += d_output.sum();

  // Gradient arriving at each timestep's hidden output of the current layer.
  std::vector<Eigen::MatrixXd> dh_above(n, Eigen::MatrixXd::Zero(l, batch));
  dh_above.back() = params.w_out().transpose() * d_output;

  for (std::size_t jj = top.lstm_depth; jj-- > 0;) {
    const LayerCache& lc = cache.layers[jj];
    const std::vector<Eigen::MatrixXd>& below = jj == 0 ? cache.dense : cache.layers[jj - 1].h;
    const auto w = params.w(jj);
    const auto u = params.u(jj);
    auto gw = grad.w(jj);
    auto gu = grad.u(jj);
    auto gb = grad.b(jj);

    std::vector<Eigen::MatrixXd> dx(n);
    Eigen::MatrixXd dh_rec = Eigen::MatrixXd::Zero(l, batch);
    Eigen::MatrixXd dc_rec = Eigen::MatrixXd::Zero(l, batch);
    Eigen::MatrixXd dz(4 * l, batch);
    for (std::size_t t = n; t-- > 0;) {
      const Eigen::MatrixXd dh = dh_above[t] + dh_rec;
      const Eigen::MatrixXd dc =
          dh.cwiseProduct(lc.o[t])
              .cwiseProduct((1.0 - lc.tanh_c[t].array().square()).matrix()) +
          dc_rec;
      const Eigen::MatrixXd c_prev = t ? lc.c[t - 1] : Eigen::MatrixXd::Zero(l, batch);
      const Eigen::MatrixXd h_prev = t ? lc.h[t - 1] : Eigen::MatrixXd::Zero(l, batch);

      dz.topRows(l) = (dc.array() * c_prev.array() * lc.f[t].array() * (1.0 - lc.f[t].array()))
                          .matrix();
      dz.middleRows(l, l) =
          (dc.array() * lc.i[t].array() * (1.0 - lc.g[t].array().square())).matrix();
      dz.middleRows(2 * l, l) =
          (dc.array() * lc.g[t].array() * lc.i[t].array() * (1.0 - lc.i[t].array())).matrix();
      dz.bottomRows(l) =
          (dh.array() * lc.tanh_c[t].array() * lc.o[t].array() * (1.0 - lc.o[t].array()))
              .matrix();

      gw.noalias() += dz * below[t].transpose();
      gu.noalias() += dz * h_prev.transpose();
      gb += dz.rowwise().sum();
      dx[t] = w.transpose() * dz;
      dh_rec = u.transpose() * dz;
      dc_rec = dc.cwiseProduct(lc.f[t]);
    }
    dh_above = std::move(dx);
  }

  auto gw_in = grad.w_in();
  auto gb_in = grad.b_in();
  for (std::size_t t = 0; t < n; ++t) {
    const Eigen::MatrixXd da =
        (dh_above[t].array() * (1.0 - cache.dense[t].array().square())).matrix();
    gw_in.noalias() += da * cache.inputs[t].transpose();
    gb_in += da.rowwise().sum();
  }
}

}  // namespace teleop::pilstm
