#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "teleop/error.hpp"
#include "teleop/experiments.hpp"

using namespace teleop;

namespace {

ScenarioConfig base(double duration = 30.0) {
  ScenarioConfig c;
  c.duration = duration;
  c.seed = 9;
  return c;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::filesystem::path scratch(const char* name) {
  auto dir = std::filesystem::temp_directory_path() / "teleop_experiments_test" / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST(Replay, MatchesConventionalLoop) {
  auto c = base(60.0);
  c.run_case = RunCase::kPredicted;
  c.predictor = PredictorKind::kConv;
  const auto run = run_case(c);
  const auto series = replay_open_loop(run.log, c, {});
  ASSERT_EQ(series[0].conv.size(), run.trace.size());
  for (std::size_t k = 0; k < run.trace.size(); ++k) {
    EXPECT_NEAR(series[index_of(CouplingVar::kXmv)].conv[k], run.trace[k].x_in[0], 1e-9);
    EXPECT_NEAR(series[index_of(CouplingVar::kXmomega)].conv[k], run.trace[k].x_in[1], 1e-9);
    EXPECT_NEAR(series[index_of(CouplingVar::kFev)].conv[k], run.trace[k].f_in[0], 1e-9);
    EXPECT_NEAR(series[index_of(CouplingVar::kFeomega)].conv[k], run.trace[k].f_in[1], 1e-9);
  }
  EXPECT_TRUE(series[0].pilstm.empty());
}

TEST(Replay, MatchesPilstmLoop) {
  pilstm::Topology t;
  t.input_len = 5;
  t.dense_units = 4;
  t.lstm_units = 3;
  ModelSet models;
  for (CouplingVar v : kAllCouplingVars) {
    auto m = std::make_shared<pilstm::Model>(
        pilstm::Model{v, pilstm::Params::init(t, 40 + index_of(v)), {}, {}, {}});
    for (auto& f : m->scaler.features) f = {-0.5, 0.5};
    m->scaler.target = {-0.2, 0.2};
    models[index_of(v)] = m;
  }
  auto c = base(40.0);
  c.run_case = RunCase::kPredicted;
  c.predictor = PredictorKind::kPilstm;
  const auto run = run_case(c, models);
  const auto series = replay_open_loop(run.log, c, models);
  ASSERT_EQ(series[0].pilstm.size(), run.trace.size());
  for (std::size_t k = 0; k < run.trace.size(); ++k) {
    EXPECT_NEAR(series[index_of(CouplingVar::kXmv)].pilstm[k], run.trace[k].x_in[0], 1e-9);
    EXPECT_NEAR(series[index_of(CouplingVar::kXmomega)].pilstm[k], run.trace[k].x_in[1], 1e-9);
    EXPECT_NEAR(series[index_of(CouplingVar::kFev)].pilstm[k], run.trace[k].f_in[0], 1e-9);
    EXPECT_NEAR(series[index_of(CouplingVar::kFeomega)].pilstm[k], run.trace[k].f_in[1], 1e-9);
  }
}

TEST(Replay, DelayedSeriesFollowsChannel) {
  auto c = base();
  c.delay.jitter_half_width = 0.0;
  const auto log = run_case(c).log;
  const auto series = replay_open_loop(log, c, {});
  const auto& s = series[index_of(CouplingVar::kFev)];
  for (std::size_t k = 10; k < s.actual.size(); ++k) EXPECT_EQ(s.delayed[k], s.actual[k - 10]);
}

TEST(GenData, OneTrainAndTestLogPerPersona) {
  DataOptions o;
  o.personas = {"operator1", "operator4"};
  o.train_duration = 8.0;
  o.test_duration = 4.0;
  const auto a = gen_data(base(), o);
  ASSERT_EQ(a.train.size(), 2u);
  ASSERT_EQ(a.test.size(), 2u);
  EXPECT_EQ(a.train[0].rows.size(), 80u);
  EXPECT_EQ(a.test[1].rows.size(), 40u);
  EXPECT_EQ(a.train[0].run_case, RunCase::kDelayed);
  EXPECT_NE(a.train[0].seed, a.test[0].seed);
  const auto b = gen_data(base(), o);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.test, b.test);
  o.personas.clear();
  EXPECT_THROW(gen_data(base(), o), ConfigError);
}

TEST(GenData, DirectoryRoundTrip) {
  DataOptions o;
  o.personas = {"operator2"};
  o.train_duration = 5.0;
  o.test_duration = 3.0;
  const auto data = gen_data(base(), o);
  const auto dir = scratch("data");
  write_dataset(data, dir);
  const auto back = read_dataset(dir);
  EXPECT_EQ(back.train, data.train);
  EXPECT_EQ(back.test, data.test);
  EXPECT_THROW(read_dataset(scratch("empty")), ConfigError);
}

TEST(OpenLoop, ConventionalOnlyGrid) {
  const auto rows = eval_open_loop(base(), {"operator1", "operator3"}, {});
  ASSERT_EQ(rows.size(), 8u);
  EXPECT_EQ(rows[0].persona, "operator1");
  EXPECT_EQ(rows[4].variable, CouplingVar::kXmv);
  for (const auto& r : rows) {
    EXPECT_FALSE(r.delta_pilstm);
    EXPECT_TRUE(r.delta_conv);
  }
  EXPECT_THROW(eval_open_loop(base(1.0), {"operator1"}, {}), ConfigError);
}

TEST(Tables, CsvLayout) {
  std::vector<OpenLoopRow> open{{"operator1", CouplingVar::kFev, 0.5, 1.25}};
  std::vector<ClosedLoopRow> closed(2);
  closed[0].persona = "operator2";
  closed[0].run_case = RunCase::kDelayed;
  closed[0].report.omega_gamma.omega = Vec2(1.0, 2.0);
  closed[0].report.completion_time = 12.5;
  closed[1].persona = "operator2";
  closed[1].run_case = RunCase::kPredicted;
  closed[1].report.left_corridor = true;
  const auto dir = scratch("tables");
  write_table3(open, dir / "t3.csv");
  write_table4(closed, dir / "t4.csv");
  write_completion(closed, dir / "c.csv");
  EXPECT_EQ(slurp(dir / "t3.csv"),
            "persona,variable,delta_n_pilstm,delta_n_conv\noperator1,f_ev,0.5,1.25\n");
  EXPECT_EQ(slurp(dir / "c.csv"),
            "persona,case,completion_time,finished,left_corridor\n"
            "operator2,delayed,12.5,1,0\noperator2,predicted,,0,1\n");
  const auto t4 = slurp(dir / "t4.csv");
  EXPECT_EQ(t4.substr(0, t4.find('\n')),
            "persona,case,omega_v,omega_omega,gamma_v,gamma_omega,gamma_combined");
  EXPECT_NE(t4.find("operator2,delayed,1,2,"), std::string::npos);
}
