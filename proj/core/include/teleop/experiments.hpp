#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "teleop/dataset.hpp"
#include "teleop/pilstm/checkpoint.hpp"
#include "teleop/pilstm/trainer.hpp"
#include "teleop/scenario.hpp"
#include "teleop/simulation.hpp"

namespace teleop {

struct DataOptions {
  std::vector<std::string> personas{"operator1", "operator2", "operator3"};
  std::string track = "mixed";
  double train_duration = 300.0;
  double test_duration = 30.0;
};

struct DataSet {
  std::vector<RunLog> train;
  std::vector<RunLog> test;
};

/// Delayed-case runs, one training and one test log per persona. The
/// conventional predictor runs in the loop to fill the predicted-history
/// features. Run seeds are derived from base.seed.
DataSet gen_data(const ScenarioConfig& base, const DataOptions& options = {});

/// train_<i>.csv and test_<i>.csv under `dir`.
void write_dataset(const DataSet& data, const std::filesystem::path& dir);
DataSet read_dataset(const std::filesystem::path& dir);

/// Trains one coupling variable on the training logs (contiguous 70/30 split)
/// and records validation and held-out test metrics on the model.
pilstm::Model train_variable(const DataSet& data, CouplingVar var,
                             const pilstm::Topology& topology, const pilstm::TrainConfig& config,
                             pilstm::TrainResult* result = nullptr,
                             const pilstm::EpochCallback& on_epoch = {});

/// Normalized RMSE of the model on every window of `logs`.
double held_out_nrmse(const pilstm::Model& model, std::span<const RunLog> logs);

/// One variable of an open-loop replay.
struct ReplaySeries {
  std::vector<double> actual;
  std::vector<double> delayed;
  std::vector<double> conv;
  std::vector<double> pilstm;  ///< empty when no model was given
};

/// Replays the sent streams of a recorded run through the delay model of
/// `config` and both predictor kinds, indexed by CouplingVar.
std::array<ReplaySeries, 4> replay_open_loop(const RunLog& recorded, const ScenarioConfig& config,
                                             const ModelSet& models);

struct OpenLoopRow {
  std::string persona;
  CouplingVar variable = CouplingVar::kXmv;
  std::optional<double> delta_pilstm;
  std::optional<double> delta_conv;
};

/// Records an ideal run per persona on config's track, replays it and returns
/// the Delta_n grid (persona x variable).
std::vector<OpenLoopRow> eval_open_loop(const ScenarioConfig& config,
                                        const std::vector<std::string>& personas,
                                        const ModelSet& models);

struct ClosedLoopRow {
  std::string persona;
  RunCase run_case = RunCase::kIdeal;
  RunReport report;
};

/// Ideal, delayed and PiLSTM-predicted runs per persona.
std::vector<ClosedLoopRow> eval_closed_loop(const ScenarioConfig& config,
                                            const std::vector<std::string>& personas,
                                            const ModelSet& models);

std::vector<std::string> persona_names();

void write_table3(const std::vector<OpenLoopRow>& rows, const std::filesystem::path& path);
void write_table4(const std::vector<ClosedLoopRow>& rows, const std::filesystem::path& path);
void write_completion(const std::vector<ClosedLoopRow>& rows, const std::filesystem::path& path);

}  // namespace teleop
