#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

namespace teleop::pilstm {

struct Topology {
  std::size_t input_len = 50;   ///< n
  std::size_t feature_dim = 4;
  std::size_t dense_units = 32; ///< m
  std::size_t lstm_depth = 1;   ///< k
  std::size_t lstm_units = 32;  ///< l

  void validate() const;
  std::size_t parameter_count() const;

  friend bool operator==(const Topology&, const Topology&) = default;
};

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatMap = Eigen::Map<RowMat>;
using ConstMatMap = Eigen::Map<const RowMat>;
using VecMap = Eigen::Map<Eigen::VectorXd>;
using ConstVecMap = Eigen::Map<const Eigen::VectorXd>;

/// All weights in one flat vector; tensors are row-major views into it.
/// Per LSTM layer the gate blocks are stacked in the order forget, candidate,
/// input, output.
class Params {
 public:
  explicit Params(Topology topology);

  /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights, zero biases except the
  /// forget gate (1).
  static Params init(const Topology& topology, std::uint64_t seed);

  const Topology& topology() const { return topology_; }
  Eigen::VectorXd& flat() { return data_; }
  const Eigen::VectorXd& flat() const { return data_; }

  MatMap w_in() { return mat(off_w_in_, m(), topology_.feature_dim); }
  ConstMatMap w_in() const { return cmat(off_w_in_, m(), topology_.feature_dim); }
  VecMap b_in() { return vec(off_b_in_, m()); }
  ConstVecMap b_in() const { return cvec(off_b_in_, m()); }

  MatMap w(std::size_t layer) { return mat(layers_[layer].w, 4 * l(), layer_input(layer)); }
  ConstMatMap w(std::size_t layer) const {
    return cmat(layers_[layer].w, 4 * l(), layer_input(layer));
  }
  MatMap u(std::size_t layer) { return mat(layers_[layer].u, 4 * l(), l()); }
  ConstMatMap u(std::size_t layer) const { return cmat(layers_[layer].u, 4 * l(), l()); }
  VecMap b(std::size_t layer) { return vec(layers_[layer].b, 4 * l()); }
  ConstVecMap b(std::size_t layer) const { return cvec(layers_[layer].b, 4 * l()); }

  MatMap w_out() { return mat(off_w_out_, 1, l()); }
  ConstMatMap w_out() const { return cmat(off_w_out_, 1, l()); }
  double& b_out() { return data_[static_cast<Eigen::Index>(off_b_out_)]; }
  double b_out() const { return data_[static_cast<Eigen::Index>(off_b_out_)]; }

  struct TensorInfo {
    std::string name;
    std::size_t offset;
    std::size_t rows;
    std::size_t cols;
  };
  /// Named tensors in storage order (W_in, b_in, W_f, U_f, b_f, ..., W_out, b_out
  /// with the layer index appended for stacked layers).
  std::vector<TensorInfo> tensors() const;

  std::size_t layer_input(std::size_t layer) const { return layer == 0 ? m() : l(); }

 private:
  struct LayerOffsets {
    std::size_t w, u, b;
  };

  std::size_t m() const { return topology_.dense_units; }
  std::size_t l() const { return topology_.lstm_units; }

  MatMap mat(std::size_t off, std::size_t r, std::size_t c) {
    return {data_.data() + off, static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)};
  }
  ConstMatMap cmat(std::size_t off, std::size_t r, std::size_t c) const {
    return {data_.data() + off, static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)};
  }
  VecMap vec(std::size_t off, std::size_t n) {
    return {data_.data() + off, static_cast<Eigen::Index>(n)};
  }
  ConstVecMap cvec(std::size_t off, std::size_t n) const {
    return {data_.data() + off, static_cast<Eigen::Index>(n)};
  }

  Topology topology_;
  Eigen::VectorXd data_;
  std::size_t off_w_in_ = 0, off_b_in_ = 0, off_w_out_ = 0, off_b_out_ = 0;
  std::vector<LayerOffsets> layers_;
};

/// A batch of sequences: inputs[t] is feature_dim x B (one column per sample).
using SequenceBatch = std::vector<Eigen::MatrixXd>;

struct LayerCache {
  std::vector<Eigen::MatrixXd> f, g, i, o, c, tanh_c, h;
};

struct ForwardCache {
  SequenceBatch inputs;
  std::vector<Eigen::MatrixXd> dense;
  std::vector<LayerCache> layers;
  Eigen::RowVectorXd output;
};

/// Time-distributed tanh dense layer, stacked LSTMs from zero state, linear
/// head on the last hidden state. Returns one prediction per column.
/// Throws TopologyError on shape mismatch and NumericError on non-finite output.
Eigen::RowVectorXd forward(const Params& params, const SequenceBatch& inputs,
                           ForwardCache* cache = nullptr);

/// Accumulates dLoss/dTheta into `grad` given dLoss/dOutput for every column.
/// Throws TopologyError if the cache does not match `d_output`.
void backward(const Params& params, const ForwardCache& cache, const Eigen::RowVectorXd& d_output,
              Params& grad);

}  // namespace teleop::pilstm
