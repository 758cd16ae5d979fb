#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "teleop/channel.hpp"
#include "teleop/control.hpp"
#include "teleop/coupling.hpp"
#include "teleop/dataset.hpp"
#include "teleop/dynamics.hpp"
#include "teleop/operator.hpp"

namespace teleop {

inline constexpr int kScenarioSchemaVersion = 1;

enum class PredictorKind { kConv, kPilstm };

std::string_view predictor_name(PredictorKind k);
PredictorKind parse_predictor(std::string_view name);

struct SlipOptions {
  double noise = 0.02;     ///< half-width of per-step uniform slip noise
  double ffc_gain = 0.4;   ///< fraction of the measured slip the compensator trusts
  double ffc_tau = 2.0;    ///< s, lag of the slip estimate

  void validate() const;
};

struct ScenarioConfig {
  std::string name = "scenario";
  std::string track = "A";
  std::optional<TerrainProfile> terrain;  ///< overrides the track's own profile
  DelayModel delay;                       ///< seed is derived from `seed` per direction
  RunCase run_case = RunCase::kIdeal;
  PredictorKind predictor = PredictorKind::kConv;
  std::array<std::string, 4> checkpoints;  ///< indexed by CouplingVar
  ControllerGains gains;
  HapticDeviceParams device;
  UgvParams ugv;
  double filter_cutoff = 0.8;
  std::string persona = "operator1";
  OperatorParams operator_params;  ///< filled from the persona, then overridden
  SlipOptions slip;
  double duration = 400.0;
  bool stop_at_finish = true;
  double sample_period = 0.1;
  double inner_dt = 0.01;
  std::uint64_t seed = 0;
  std::string output_dir = "out";

  /// Throws ConfigError.
  void validate() const;
};

/// Persona parameters by name ("operator1".."operator5").
OperatorParams persona_params(const std::string& name);

/// Parses the versioned scenario JSON. Relative checkpoint paths are resolved
/// against `base_dir`. Throws ConfigError for invalid content.
ScenarioConfig parse_scenario(const std::string& text,
                              const std::filesystem::path& base_dir = {});
ScenarioConfig load_scenario(const std::filesystem::path& path);
std::string scenario_to_json(const ScenarioConfig& config);

/// Delay model of one direction with the seed drawn from the run seed.
DelayModel channel_model(const ScenarioConfig& config, bool forward);

}  // namespace teleop
