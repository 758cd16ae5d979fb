#include <CLI11.hpp>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>

#include "teleop/error.hpp"
#include "teleop/experiments.hpp"
#include "teleop/pilstm/gradcheck.hpp"
#include "teleop/simulation.hpp"

#ifdef TELEOP_WITH_BRIDGE
#include "teleop/bridge/server.hpp"
#endif

namespace {

using namespace teleop;
using nlohmann::json;
namespace fs = std::filesystem;

constexpr int kUsageError = 2;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = "out";
};

ScenarioConfig load(const Common& c) {
  ScenarioConfig s = c.config.empty() ? ScenarioConfig{} : load_scenario(c.config);
  if (c.seed) s.seed = *c.seed;
  s.validate();
  return s;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

json report_json(const ScenarioConfig& c, const RunReport& r) {
  const auto& og = r.omega_gamma;
  json j = {{"case", case_name(c.run_case)},
            {"predictor", predictor_name(c.predictor)},
            {"persona", c.persona},
            {"track", c.track},
            {"seed", c.seed},
            {"omega", {og.omega[0], og.omega[1]}},
            {"gamma", {og.gamma[0], og.gamma[1]}},
            {"gamma_combined", og.gamma_combined},
            {"finished", r.completion_time.has_value()},
            {"left_corridor", r.left_corridor},
            {"duration", r.duration}};
  j["completion_time"] = r.completion_time ? json(*r.completion_time) : json(nullptr);
  return j;
}

/// Checkpoints named by the scenario, or ckpt_<var>.json files in `dir`.
ModelSet models_for(const ScenarioConfig& c, const std::string& dir) {
  if (dir.empty()) return load_models(c);
  ModelSet m;
  for (CouplingVar v : kAllCouplingVars) {
    const fs::path p = fs::path(dir) / ("ckpt_" + std::string(var_name(v)) + ".json");
    if (!fs::exists(p)) throw ConfigError("missing checkpoint " + p.string());
    m[index_of(v)] = std::make_shared<pilstm::Model>(pilstm::load_checkpoint(p));
  }
  return m;
}

int cmd_simulate(const Common& c) {
  const ScenarioConfig s = load(c);
  const RunResult r = run_case(s, load_models(s));
  const fs::path out(c.out);
  fs::create_directories(out);
  write_log(r.log, out / "log.csv");
  write_text(out / "report.json", report_json(s, r.report).dump(2) + "\n");
  std::printf("%s: omega=(%.4f, %.4f) gamma=(%.4f, %.4f) completion=%s\n",
              std::string(case_name(s.run_case)).c_str(), r.report.omega_gamma.omega[0],
              r.report.omega_gamma.omega[1], r.report.omega_gamma.gamma[0],
              r.report.omega_gamma.gamma[1],
              r.report.completion_time ? std::to_string(*r.report.completion_time).c_str() : "dnf");
  return 0;
}

int cmd_gen_data(const Common& c, const DataOptions& opts) {
  const DataSet d = gen_data(load(c), opts);
  write_dataset(d, fs::path(c.out) / "data");
  std::printf("wrote %zu training and %zu test logs to %s\n", d.train.size(), d.test.size(),
              (fs::path(c.out) / "data").string().c_str());
  return 0;
}

struct TrainArgs {
  std::string variable = "all";
  std::string data;
  pilstm::Topology topology;
  pilstm::TrainConfig config;
  DataOptions data_options;
};

int cmd_train(const Common& c, TrainArgs a) {
  const ScenarioConfig s = load(c);
  const fs::path out(c.out);
  const fs::path data_dir = a.data.empty() ? out / "data" : fs::path(a.data);
  DataSet data;
  if (fs::exists(data_dir / "train_0.csv")) {
    data = read_dataset(data_dir);
  } else {
    data = gen_data(s, a.data_options);
    write_dataset(data, data_dir);
  }
  a.config.seed = s.seed;
  std::vector<CouplingVar> vars;
  if (a.variable == "all") {
    vars.assign(kAllCouplingVars.begin(), kAllCouplingVars.end());
  } else {
    vars.push_back(parse_var(a.variable));
  }
  for (CouplingVar v : vars) {
    const std::string name(var_name(v));
    pilstm::TrainResult tr{pilstm::Params(a.topology), {}, {}, 0, 0.0};
    const auto model = train_variable(data, v, a.topology, a.config, &tr,
                                      [&](const pilstm::EpochLog& e) {
                                        std::printf("%s epoch %zu data %.5f physics %.5f val %.5f\n",
                                                    name.c_str(), e.epoch, e.data_loss,
                                                    e.physics_loss, e.val_loss);
                                        std::fflush(stdout);
                                      });
    pilstm::save_checkpoint(model, out / ("ckpt_" + name + ".json"));
    pilstm::save_training_log(tr, v, out / ("train_log_" + name + ".json"));
    std::printf("%s: best epoch %zu, held-out nrmse %.4f\n", name.c_str(), tr.best_epoch,
                model.metrics.count("test_nrmse") ? model.metrics.at("test_nrmse") : 0.0);
  }
  return 0;
}

std::vector<std::string> personas_or_all(const std::vector<std::string>& p) {
  return p.empty() ? persona_names() : p;
}

int cmd_eval_open_loop(const Common& c, const std::string& ckpt,
                       const std::vector<std::string>& personas) {
  const ScenarioConfig s = load(c);
  const auto rows = eval_open_loop(s, personas_or_all(personas), models_for(s, ckpt));
  write_table3(rows, fs::path(c.out) / "tables3.csv");
  for (const auto& r : rows) {
    std::printf("%s %s pilstm %.1f%% conv %.1f%%\n", r.persona.c_str(),
                std::string(var_name(r.variable)).c_str(), r.delta_pilstm.value_or(NAN),
                r.delta_conv.value_or(NAN));
  }
  return 0;
}

int cmd_eval_closed_loop(const Common& c, const std::string& ckpt,
                         const std::vector<std::string>& personas) {
  const ScenarioConfig s = load(c);
  const ModelSet models = models_for(s, ckpt);
  const auto who = personas_or_all(personas);
  const fs::path out(c.out);
  write_table3(eval_open_loop(s, who, models), out / "tables3.csv");
  const auto rows = eval_closed_loop(s, who, models);
  write_table4(rows, out / "tables4.csv");
  write_completion(rows, out / "completion.csv");
  for (const auto& r : rows) {
    const auto& og = r.report.omega_gamma;
    std::printf("%s %-9s omega=(%.4f, %.4f) gamma=(%.4f, %.4f)\n", r.persona.c_str(),
                std::string(case_name(r.run_case)).c_str(), og.omega[0], og.omega[1], og.gamma[0],
                og.gamma[1]);
  }
  return 0;
}

int cmd_gradcheck(const Common& c, pilstm::GradCheckOptions o, double tolerance) {
  if (c.seed) o.seed = *c.seed;
  const auto r = pilstm::gradient_check(o);
  std::printf("%zu parameters, max relative error %.3e (parameter %zu)\n", r.analytic.size(),
              r.max_rel_error, r.worst);
  return r.max_rel_error < tolerance ? 0 : 1;
}

#ifdef TELEOP_WITH_BRIDGE
bridge::Server* g_server = nullptr;

int cmd_serve(const Common& c, bridge::ServerOptions o, const std::string& ckpt) {
  ScenarioConfig s = load(c);
  bridge::Server server(s, ckpt.empty() ? load_models(s) : models_for(s, ckpt), std::move(o));
  g_server = &server;
  std::signal(SIGINT, [](int) { g_server->stop(); });
  std::signal(SIGTERM, [](int) { g_server->stop(); });
  std::printf("listening on port %u\n", server.port());
  std::fflush(stdout);
  server.run();
  g_server = nullptr;
  return 0;
}
#endif

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Delayed bilateral teleoperation simulator"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config, "scenario JSON")->check(CLI::ExistingFile);
    sub->add_option("--seed", common.seed, "overrides the scenario seed");
    sub->add_option("--out", common.out, "output directory")->capture_default_str();
  };

  auto* simulate = app.add_subcommand("simulate", "run one case and write log.csv and report.json");
  add_common(simulate);

  DataOptions data_opts;
  auto add_data = [&](CLI::App* sub) {
    sub->add_option("--personas", data_opts.personas)->capture_default_str();
    sub->add_option("--track", data_opts.track)->capture_default_str();
    sub->add_option("--train-duration", data_opts.train_duration)->capture_default_str();
    sub->add_option("--test-duration", data_opts.test_duration)->capture_default_str();
  };
  auto* gen = app.add_subcommand("gen-data", "delayed-case training and test logs");
  add_common(gen);
  add_data(gen);

  TrainArgs train_args;
  auto* train = app.add_subcommand("train", "train PiLSTM predictors");
  add_common(train);
  add_data(train);
  train->add_option("--variable", train_args.variable, "x_mv, x_momega, f_ev, f_eomega or all")
      ->check(CLI::IsMember({"all", "x_mv", "x_momega", "f_ev", "f_eomega"}))
      ->capture_default_str();
  train->add_option("--data", train_args.data, "dataset directory (default <out>/data)");
  train->add_option("--epochs", train_args.config.epochs)->capture_default_str();
  train->add_option("--lambda", train_args.config.physics_weight, "physics weight")
      ->capture_default_str();
  train->add_option("--lr", train_args.config.learning_rate)->capture_default_str();
  train->add_option("--clip", train_args.config.grad_clip_threshold)->capture_default_str();
  train->add_option("--batch", train_args.config.batch_size)->capture_default_str();
  train->add_option("--window", train_args.topology.input_len)->capture_default_str();
  train->add_option("--dense", train_args.topology.dense_units)->capture_default_str();
  train->add_option("--lstm-units", train_args.topology.lstm_units)->capture_default_str();
  train->add_option("--lstm-depth", train_args.topology.lstm_depth)->capture_default_str();

  std::string ckpt_dir;
  std::vector<std::string> personas;
  auto* open_loop = app.add_subcommand("eval-open-loop", "replay ideal runs, write tables3.csv");
  auto* closed_loop = app.add_subcommand(
      "eval-closed-loop", "three-case sweep, write tables3.csv, tables4.csv and completion.csv");
  for (auto* sub : {open_loop, closed_loop}) {
    add_common(sub);
    sub->add_option("--checkpoints", ckpt_dir, "directory with ckpt_<variable>.json");
    sub->add_option("--personas", personas, "default: all five");
  }

  pilstm::GradCheckOptions gc;
  double gc_tol = 1e-4;
  auto* gradcheck = app.add_subcommand("gradcheck", "analytic against numeric gradients");
  add_common(gradcheck);
  gradcheck->add_option("--lambda", gc.physics_weight)->capture_default_str();
  gradcheck->add_option("--step", gc.step)->capture_default_str();
  gradcheck->add_option("--tolerance", gc_tol)->capture_default_str();

#ifdef TELEOP_WITH_BRIDGE
  bridge::ServerOptions server_opts;
  std::string static_dir;
  auto* serve = app.add_subcommand("serve", "cockpit bridge on /teleop");
  add_common(serve);
  serve->add_option("--port", server_opts.port)->capture_default_str();
  serve->add_option("--address", server_opts.address)->capture_default_str();
  serve->add_option("--static", static_dir, "cockpit build directory served under /");
  serve->add_option("--checkpoints", ckpt_dir, "directory with ckpt_<variable>.json");
#endif

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  try {
    if (*simulate) return cmd_simulate(common);
    if (*gen) return cmd_gen_data(common, data_opts);
    if (*train) {
      train_args.data_options = data_opts;
      return cmd_train(common, train_args);
    }
    if (*open_loop) return cmd_eval_open_loop(common, ckpt_dir, personas);
    if (*closed_loop) return cmd_eval_closed_loop(common, ckpt_dir, personas);
    if (*gradcheck) return cmd_gradcheck(common, gc, gc_tol);
#ifdef TELEOP_WITH_BRIDGE
    if (*serve) {
      server_opts.static_dir = static_dir;
      return cmd_serve(common, server_opts, ckpt_dir);
    }
#endif
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kUsageError;
}
