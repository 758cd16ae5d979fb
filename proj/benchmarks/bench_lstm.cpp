#include <benchmark/benchmark.h>

#include "teleop/pilstm/network.hpp"

using namespace teleop::pilstm;

namespace {

SequenceBatch random_inputs(const Topology& t, Eigen::Index batch) {
  SequenceBatch in(t.input_len);
  for (auto& x : in) x = Eigen::MatrixXd::Random(static_cast<Eigen::Index>(t.feature_dim), batch);
  return in;
}

void BM_Forward(benchmark::State& state) {
  const Topology t;
  const Params p = Params::init(t, 1);
  const auto in = random_inputs(t, state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(forward(p, in));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Forward)->Arg(1)->Arg(64);

void BM_ForwardBackward(benchmark::State& state) {
  const Topology t;
  const Params p = Params::init(t, 1);
  Params grad(t);
  const auto in = random_inputs(t, state.range(0));
  const Eigen::RowVectorXd d_out = Eigen::RowVectorXd::Ones(state.range(0));
  for (auto _ : state) {
    ForwardCache cache;
    forward(p, in, &cache);
    backward(p, cache, d_out, grad);
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ForwardBackward)->Arg(64);

}  // namespace

BENCHMARK_MAIN();
