#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "teleop/error.hpp"
#include "teleop/pilstm/network.hpp"

using namespace teleop::pilstm;

namespace {

double sig(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Loop-by-loop evaluation of one sequence, independent of the matrix code.
double reference_forward(const Params& p, const std::vector<std::vector<double>>& seq) {
  const Topology& top = p.topology();
  const std::size_t m = top.dense_units, l = top.lstm_units;
  std::vector<std::vector<double>> layer_in;
  for (const auto& x : seq) {
    std::vector<double> d(m);
    for (std::size_t r = 0; r < m; ++r) {
      double z = p.b_in()[static_cast<Eigen::Index>(r)];
      for (std::size_t j = 0; j < x.size(); ++j) {
        z += p.w_in()(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) * x[j];
      }
      d[r] = std::tanh(z);
    }
    layer_in.push_back(d);
  }
  for (std::size_t layer = 0; layer < top.lstm_depth; ++layer) {
    std::vector<double> h(l, 0.0), c(l, 0.0);
    std::vector<std::vector<double>> out;
    const auto W = p.w(layer);
    const auto U = p.u(layer);
    const auto B = p.b(layer);
    for (const auto& x : layer_in) {
      std::vector<double> z(4 * l);
      for (std::size_t r = 0; r < 4 * l; ++r) {
        double s = B[static_cast<Eigen::Index>(r)];
        for (std::size_t j = 0; j < x.size(); ++j) s += W(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) * x[j];
        for (std::size_t j = 0; j < l; ++j) s += U(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) * h[j];
        z[r] = s;
      }
      for (std::size_t u = 0; u < l; ++u) {
        const double f = sig(z[u]), g = std::tanh(z[l + u]), i = sig(z[2 * l + u]),
                     o = sig(z[3 * l + u]);
        c[u] = f * c[u] + i * g;
        h[u] = o * std::tanh(c[u]);
      }
      out.push_back(h);
    }
    layer_in = out;
  }
  double y = p.b_out();
  for (std::size_t u = 0; u < l; ++u) y += p.w_out()(0, static_cast<Eigen::Index>(u)) * layer_in.back()[u];
  return y;
}

SequenceBatch random_inputs(std::size_t n, Eigen::Index batch, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  SequenceBatch s;
  for (std::size_t t = 0; t < n; ++t) s.push_back(Eigen::MatrixXd::NullaryExpr(4, batch, [&] { return g(rng); }));
  return s;
}

}  // namespace

TEST(Topology, ParameterCount) {
  const Topology t{50, 4, 32, 1, 32};
  // dense 4*32+32, lstm 4*32*(32+32+1), head 32+1
  EXPECT_EQ(t.parameter_count(), 4u * 32 + 32 + 4 * 32 * 65 + 33);
  Params p(t);
  EXPECT_EQ(static_cast<std::size_t>(p.flat().size()), t.parameter_count());
}

TEST(Topology, ValidateRejectsZeroSizes) {
  Topology t;
  t.lstm_units = 0;
  EXPECT_THROW(t.validate(), teleop::TopologyError);
}

TEST(Params, InitSetsForgetBiasAndBoundsWeights) {
  const Topology t{5, 4, 3, 2, 4};
  const Params p = Params::init(t, 7);
  for (std::size_t layer = 0; layer < 2; ++layer) {
    for (Eigen::Index u = 0; u < 4; ++u) EXPECT_DOUBLE_EQ(p.b(layer)[u], 1.0);
    for (Eigen::Index u = 4; u < 16; ++u) EXPECT_DOUBLE_EQ(p.b(layer)[u], 0.0);
    const double bound = 1.0 / std::sqrt(static_cast<double>(p.layer_input(layer)));
    EXPECT_LE(p.w(layer).cwiseAbs().maxCoeff(), bound);
  }
  EXPECT_TRUE(Params::init(t, 7).flat() == p.flat());
  EXPECT_FALSE(Params::init(t, 8).flat() == p.flat());
}

TEST(Params, TensorsTileTheFlatVector) {
  const Params p(Topology{5, 4, 3, 2, 4});
  auto tensors = p.tensors();
  std::sort(tensors.begin(), tensors.end(),
            [](const auto& a, const auto& b) { return a.offset < b.offset; });
  std::size_t next = 0;
  for (const auto& info : tensors) {
    EXPECT_EQ(info.offset, next) << info.name;
    next += info.rows * info.cols;
  }
  EXPECT_EQ(next, static_cast<std::size_t>(p.flat().size()));
}

TEST(Forward, MatchesLoopReference) {
  for (std::size_t depth : {1u, 2u}) {
    const Topology t{6, 4, 3, depth, 5};
    Params p = Params::init(t, 11);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g(0.0, 0.3);
    for (Eigen::Index i = 0; i < p.flat().size(); ++i) p.flat()[i] += g(rng);
    const SequenceBatch in = random_inputs(6, 4, 5);
    const Eigen::RowVectorXd y = forward(p, in);
    for (Eigen::Index b = 0; b < 4; ++b) {
      std::vector<std::vector<double>> seq;
      for (const auto& x : in) seq.push_back({x(0, b), x(1, b), x(2, b), x(3, b)});
      EXPECT_NEAR(y[b], reference_forward(p, seq), 1e-13);
    }
  }
}

TEST(Forward, ColumnsAreIndependent) {
  const Topology t{4, 4, 3, 1, 3};
  const Params p = Params::init(t, 2);
  SequenceBatch in = random_inputs(4, 3, 9);
  const Eigen::RowVectorXd y = forward(p, in);
  for (auto& x : in) x.col(2).setConstant(5.0);
  const Eigen::RowVectorXd y2 = forward(p, in);
  EXPECT_EQ(y[0], y2[0]);
  EXPECT_EQ(y[1], y2[1]);
  EXPECT_NE(y[2], y2[2]);
}

TEST(Forward, RejectsWrongShapes) {
  const Params p = Params::init(Topology{4, 4, 3, 1, 3}, 2);
  EXPECT_THROW(forward(p, random_inputs(3, 2, 1)), teleop::TopologyError);
  SequenceBatch bad = random_inputs(4, 2, 1);
  bad[1] = Eigen::MatrixXd::Zero(3, 2);
  EXPECT_THROW(forward(p, bad), teleop::TopologyError);
}

TEST(Backward, MatchesFiniteDifferencesOfLinearLoss) {
  for (std::size_t depth : {1u, 2u}) {
    const Topology t{5, 4, 3, depth, 4};
    Params p = Params::init(t, 4);
    const SequenceBatch in = random_inputs(5, 3, 8);
    const Eigen::RowVectorXd w = (Eigen::RowVectorXd(3) << 0.7, -1.3, 0.4).finished();

    ForwardCache cache;
    forward(p, in, &cache);
    Params g(t);
    g.flat().setZero();
    backward(p, cache, w, g);

    const double h = 1e-6;
    for (Eigen::Index i = 0; i < p.flat().size(); ++i) {
      const double s = p.flat()[i];
      p.flat()[i] = s + h;
      const double up = forward(p, in).dot(w);
      p.flat()[i] = s - h;
      const double down = forward(p, in).dot(w);
      p.flat()[i] = s;
      const double num = (up - down) / (2 * h);
      EXPECT_NEAR(g.flat()[i], num, 1e-7 + 1e-6 * std::abs(num)) << "parameter " << i;
    }
  }
}

TEST(Backward, AccumulatesIntoGradient) {
  const Topology t{3, 4, 2, 1, 2};
  const Params p = Params::init(t, 1);
  const SequenceBatch in = random_inputs(3, 2, 2);
  ForwardCache cache;
  forward(p, in, &cache);
  const Eigen::RowVectorXd d = Eigen::RowVectorXd::Ones(2);
  Params once(t), twice(t);
  once.flat().setZero();
  twice.flat().setZero();
  backward(p, cache, d, once);
  backward(p, cache, d, twice);
  backward(p, cache, d, twice);
  EXPECT_TRUE(twice.flat().isApprox(2.0 * once.flat()));
}
