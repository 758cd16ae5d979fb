#include "teleop/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

#include "teleop/conv_predictor.hpp"
#include "teleop/error.hpp"
#include "teleop/pilstm/online.hpp"

namespace teleop {
namespace {

constexpr std::uint64_t kTrainSeedOffset = 1000;
constexpr std::uint64_t kTestSeedOffset = 2000;

ScenarioConfig data_config(const ScenarioConfig& base, const DataOptions& options,
                           const std::string& persona, std::uint64_t seed, double duration) {
  ScenarioConfig c = base;
  c.track = options.track;
  c.terrain.reset();
  c.run_case = RunCase::kDelayed;
  c.predictor = PredictorKind::kConv;
  c.persona = persona;
  c.operator_params = persona_params(persona);
  c.duration = duration;
  c.stop_at_finish = false;
  c.seed = seed;
  return c;
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << std::setprecision(17);
  return out;
}

std::string csv_number(const std::optional<double>& v) {
  if (!v) return "";
  std::ostringstream s;
  s << std::setprecision(17) << *v;
  return s.str();
}

}  // namespace

std::vector<std::string> persona_names() {
  std::vector<std::string> out;
  for (const auto& p : default_personas()) out.push_back(p.name);
  return out;
}

DataSet gen_data(const ScenarioConfig& base, const DataOptions& options) {
  if (options.personas.empty()) throw ConfigError("gen_data needs at least one persona");
  DataSet data;
  for (std::size_t i = 0; i < options.personas.size(); ++i) {
    const auto& persona = options.personas[i];
    data.train.push_back(run_case(data_config(base, options, persona,
                                              base.seed + kTrainSeedOffset + i,
                                              options.train_duration))
                             .log);
    data.test.push_back(run_case(data_config(base, options, persona,
                                             base.seed + kTestSeedOffset + i,
                                             options.test_duration))
                            .log);
  }
  return data;
}

void write_dataset(const DataSet& data, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (std::size_t i = 0; i < data.train.size(); ++i) {
    write_log(data.train[i], dir / ("train_" + std::to_string(i) + ".csv"));
  }
  for (std::size_t i = 0; i < data.test.size(); ++i) {
    write_log(data.test[i], dir / ("test_" + std::to_string(i) + ".csv"));
  }
}

DataSet read_dataset(const std::filesystem::path& dir) {
  DataSet data;
  for (const char* kind : {"train", "test"}) {
    auto& dst = std::string_view(kind) == "train" ? data.train : data.test;
    for (std::size_t i = 0;; ++i) {
      const auto p = dir / (std::string(kind) + "_" + std::to_string(i) + ".csv");
      if (!std::filesystem::exists(p)) break;
      dst.push_back(read_log(p));
    }
  }
  if (data.train.empty()) throw ConfigError("no training logs in " + dir.string());
  return data;
}

pilstm::Model train_variable(const DataSet& data, CouplingVar var,
                             const pilstm::Topology& topology, const pilstm::TrainConfig& config,
                             pilstm::TrainResult* result, const pilstm::EpochCallback& on_epoch) {
  const Split s = split(window_all(data.train, var, topology.input_len),
                        1.0 - config.validation_fraction);
  pilstm::TrainResult r = pilstm::train(s, topology, config, on_epoch);

  pilstm::Model model{var, r.params, r.scaler, config, {}};
  const auto val = pilstm::evaluate(r.params, r.scaler, s.validation, config);
  model.metrics["val_rmse_scaled"] = val.rmse;
  model.metrics["val_dde_residual"] = val.dde_residual;
  model.metrics["best_epoch"] = static_cast<double>(r.best_epoch);
  if (!data.test.empty()) model.metrics["test_nrmse"] = held_out_nrmse(model, data.test);
  if (result) *result = std::move(r);
  return model;
}

double held_out_nrmse(const pilstm::Model& model, std::span<const RunLog> logs) {
  const auto windows = window_all(logs, model.variable, model.params.topology().input_len);
  if (windows.empty()) throw ConfigError("held-out logs are shorter than the input window");
  const auto ev = pilstm::evaluate(model.params, model.scaler, windows, model.config);
  std::vector<double> targets;
  targets.reserve(windows.size());
  for (const auto& w : windows) targets.push_back(w.target);
  return normalized_rmse(ev.predictions, targets);
}

std::array<ReplaySeries, 4> replay_open_loop(const RunLog& recorded, const ScenarioConfig& config,
                                             const ModelSet& models) {
  std::array<ReplaySeries, 4> out;
  const double dt = config.sample_period;
  for (bool fwd : {true, false}) {
    const CouplingVar a = fwd ? CouplingVar::kXmv : CouplingVar::kFev;
    const CouplingVar b = fwd ? CouplingVar::kXmomega : CouplingVar::kFeomega;
    const bool with_pilstm = models[index_of(a)] && models[index_of(b)];

    auto conv = [&](CouplingVar v) {
      ConvPredictorParams p = conv_params_for(v);
      p.dt = dt;
      p.max_delay = kMaxPredictorDelay;
      return std::make_unique<ConvPredictor>(p);
    };
    std::array<std::unique_ptr<Predictor>, 2> conv_pred{conv(a), conv(b)};
    std::array<std::unique_ptr<Predictor>, 2> nn_pred;
    if (with_pilstm) {
      for (std::size_t i = 0; i < 2; ++i) {
        nn_pred[i] = std::make_unique<pilstm::PilstmPredictor>(models[index_of(i ? b : a)], dt,
                                                               kMaxPredictorDelay);
      }
    }
    // Identical seeds give both predictor kinds the same delivery schedule.
    DelayChannel ch_conv(channel_model(config, fwd));
    DelayChannel ch_nn(channel_model(config, fwd));

    for (std::size_t k = 0; k < recorded.rows.size(); ++k) {
      const LogRow& row = recorded.rows[k];
      const Vec2 sent(row[a].x_actual, row[b].x_actual);
      const LinkStep sc = pass_link(ch_conv, {conv_pred[0].get(), conv_pred[1].get()}, sent, row.t);
      std::optional<LinkStep> sn;
      if (with_pilstm) sn = pass_link(ch_nn, {nn_pred[0].get(), nn_pred[1].get()}, sent, row.t);
      for (std::size_t i = 0; i < 2; ++i) {
        auto& s = out[index_of(i ? b : a)];
        const auto e = static_cast<Eigen::Index>(i);
        s.actual.push_back(sent[e]);
        s.delayed.push_back(sc.delayed[e]);
        s.conv.push_back(sc.predicted[e]);
        if (sn) s.pilstm.push_back(sn->predicted[e]);
      }
    }
  }
  return out;
}

std::vector<OpenLoopRow> eval_open_loop(const ScenarioConfig& config,
                                        const std::vector<std::string>& personas,
                                        const ModelSet& models) {
  std::vector<OpenLoopRow> rows;
  for (const auto& persona : personas) {
    ScenarioConfig c = config;
    c.persona = persona;
    c.operator_params = persona_params(persona);
    c.run_case = RunCase::kIdeal;
    const RunLog recorded = run_case(c, models).log;
    const std::size_t warmup =
        static_cast<std::size_t>(std::ceil(kMaxPredictorDelay / c.sample_period)) +
        (models[0] ? models[0]->params.topology().input_len : 0);
    if (recorded.rows.size() <= warmup) {
      throw ConfigError("recorded run of " + persona + " is too short for the predictor warm-up");
    }
    const auto series = replay_open_loop(recorded, c, models);
    for (CouplingVar v : kAllCouplingVars) {
      const auto& s = series[index_of(v)];
      OpenLoopRow r{persona, v, std::nullopt, delta_n(s.conv, s.delayed, s.actual)};
      if (!s.pilstm.empty()) r.delta_pilstm = delta_n(s.pilstm, s.delayed, s.actual);
      rows.push_back(r);
    }
  }
  return rows;
}

std::vector<ClosedLoopRow> eval_closed_loop(const ScenarioConfig& config,
                                            const std::vector<std::string>& personas,
                                            const ModelSet& models) {
  std::vector<ClosedLoopRow> rows;
  for (const auto& persona : personas) {
    for (RunCase rc : {RunCase::kIdeal, RunCase::kDelayed, RunCase::kPredicted}) {
      ScenarioConfig c = config;
      c.persona = persona;
      c.operator_params = persona_params(persona);
      c.run_case = rc;
      c.predictor = PredictorKind::kPilstm;
      rows.push_back({persona, rc, run_case(c, models).report});
    }
  }
  return rows;
}

void write_table3(const std::vector<OpenLoopRow>& rows, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "persona,variable,delta_n_pilstm,delta_n_conv\n";
  for (const auto& r : rows) {
    out << r.persona << ',' << var_name(r.variable) << ',' << csv_number(r.delta_pilstm) << ','
        << csv_number(r.delta_conv) << '\n';
  }
}

void write_table4(const std::vector<ClosedLoopRow>& rows, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "persona,case,omega_v,omega_omega,gamma_v,gamma_omega,gamma_combined\n";
  for (const auto& r : rows) {
    const auto& og = r.report.omega_gamma;
    out << r.persona << ',' << case_name(r.run_case) << ',' << og.omega[0] << ',' << og.omega[1]
        << ',' << og.gamma[0] << ',' << og.gamma[1] << ',' << og.gamma_combined << '\n';
  }
}

void write_completion(const std::vector<ClosedLoopRow>& rows, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "persona,case,completion_time,finished,left_corridor\n";
  for (const auto& r : rows) {
    out << r.persona << ',' << case_name(r.run_case) << ',' << csv_number(r.report.completion_time)
        << ',' << (r.report.completion_time ? 1 : 0) << ',' << (r.report.left_corridor ? 1 : 0)
        << '\n';
  }
}

}  // namespace teleop
