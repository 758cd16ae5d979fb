#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "teleop/coupling.hpp"
#include "teleop/pilstm/network.hpp"
#include "teleop/pilstm/scaler.hpp"
#include "teleop/pilstm/trainer.hpp"

namespace teleop::pilstm {

inline constexpr int kCheckpointVersion = 1;

/// Trained predictor for one coupling variable.
struct Model {
  CouplingVar variable = CouplingVar::kXmv;
  Params params;
  Scaler scaler;
  TrainConfig config;
  std::map<std::string, double> metrics;
};

/// Versioned JSON: topology, row-major tensors with shapes, scaler, training
/// config and metrics. Reloading reproduces every weight bit-exactly.
std::string checkpoint_to_json(const Model& model);
Model checkpoint_from_json(const std::string& text);

void save_checkpoint(const Model& model, const std::filesystem::path& path);
/// Throws ParseError for malformed files, TopologyError for inconsistent shapes.
Model load_checkpoint(const std::filesystem::path& path);

/// Per-epoch losses as JSON.
void save_training_log(const TrainResult& result, CouplingVar variable,
                       const std::filesystem::path& path);

}  // namespace teleop::pilstm
