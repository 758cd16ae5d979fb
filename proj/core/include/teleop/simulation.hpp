#pragma once

#include <array>
#include <memory>
#include <optional>
#include <random>
#include <vector>

#include "teleop/channel.hpp"
#include "teleop/control.hpp"
#include "teleop/dataset.hpp"
#include "teleop/metrics.hpp"
#include "teleop/operator.hpp"
#include "teleop/pilstm/checkpoint.hpp"
#include "teleop/predictor.hpp"
#include "teleop/scenario.hpp"
#include "teleop/track.hpp"

namespace teleop {

using ModelSet = std::array<std::shared_ptr<const pilstm::Model>, 4>;

inline constexpr double kMaxPredictorDelay = 2.5;

/// One direction of the delayed link at one sample instant.
struct LinkStep {
  Vec2 delayed = Vec2::Zero();    ///< latest delivered payload (held if nothing new)
  Vec2 predicted = Vec2::Zero();  ///< predictor outputs
  std::array<FeatureRow, 2> features;
  double delay = 0.0;             ///< age of the delivered payload, base delay before the first
};

/// Sends `sent` at time t, takes the latest delivery and runs both axis
/// predictors on it. The derivative comes from the last two deliveries.
LinkStep pass_link(DelayChannel& channel, const std::array<Predictor*, 2>& predictors,
                   const Vec2& sent, double t);

/// Loads the four checkpoints named by the scenario (empty entries stay null).
ModelSet load_models(const ScenarioConfig& config);

/// Everything observed at one 10 Hz tick, beyond the CSV log.
struct TraceRow {
  double t = 0.0;
  Vec2 x_m = Vec2::Zero();       ///< master command before filtering
  Vec2 x_sent = Vec2::Zero();    ///< filtered command put on the channel
  Vec2 x_in = Vec2::Zero();      ///< command used by the slave controller
  Vec2 u_s = Vec2::Zero();
  Vec2 velocity = Vec2::Zero();  ///< (v_s, omega_s)
  Vec2 f_e = Vec2::Zero();
  Vec2 f_sent = Vec2::Zero();
  Vec2 f_in = Vec2::Zero();      ///< feedback used by the master controller
  Vec2 u_m = Vec2::Zero();
  Vec2 f_h = Vec2::Zero();       ///< applied operator force, last inner step of the tick
  Vec2 f_h_est = Vec2::Zero();   ///< estimate from master motion at the same step
  Pose2 pose;
  WheelPair slip;
  WheelPair slip_estimate;
  double delay_forward = 0.0;
  double delay_backward = 0.0;
  std::size_t backlog_forward = 0;   ///< packets in flight when the tick starts
  std::size_t backlog_backward = 0;
  double progress = 0.0;
  double lateral = 0.0;
};

/// 100 Hz master-side samples: x_m before the step, and the u_m and f_h
/// applied during it.
struct FineSample {
  Vec2 x_m;
  Vec2 u_m;
  Vec2 f_h;
};

struct RunReport {
  OmegaGamma omega_gamma;
  std::optional<double> completion_time;
  bool left_corridor = false;
  double duration = 0.0;
};

struct RunResult {
  RunLog log;
  std::vector<TraceRow> trace;
  std::vector<FineSample> fine;
  RunReport report;
};

RunReport compute_report(const std::vector<TraceRow>& trace, const TrackGeometry& track,
                         std::optional<double> completion, bool left_corridor);

/// Closed teleoperation loop at the sample rate with inner integration steps.
class TeleopSimulation {
 public:
  explicit TeleopSimulation(ScenarioConfig config, ModelSet models = {});

  /// Restarts from rest in `run_case`, clearing channels, filters and predictors.
  void reset(RunCase run_case);
  void reset() { reset(config_.run_case); }

  /// Replaces the scripted operator by a direct command reference, e.g. from
  /// a human client; nullopt restores the script.
  void set_manual_reference(std::optional<Vec2> x_ref) { manual_ref_ = x_ref; }

  /// One sample period: exchange, control, log, integrate.
  const TraceRow& tick();

  bool done() const { return done_; }
  double time() const { return static_cast<double>(k_) * config_.sample_period; }

  const ScenarioConfig& config() const { return config_; }
  const TrackGeometry& track() const { return track_; }
  RunCase run_case() const { return run_case_; }
  const RunLog& log() const { return log_; }
  const std::vector<TraceRow>& trace() const { return trace_; }
  const std::vector<FineSample>& fine() const { return fine_; }
  std::optional<double> completion_time() const { return completion_; }
  bool left_corridor() const { return left_corridor_; }

  /// Runs tick() until done and returns the collected result.
  RunResult run();

 private:
  struct Link {
    std::unique_ptr<DelayChannel> channel;
    std::array<std::unique_ptr<Predictor>, 2> predictors;
    std::array<BackwardDifference, 2> ideal_diff{BackwardDifference(0.1), BackwardDifference(0.1)};
  };

  /// Passes `sent` through one direction; fills the two coupling samples and
  /// returns the value the receiving controller uses.
  Vec2 exchange(Link& link, const Vec2& sent, double t, CouplingSample& a, CouplingSample& b,
                double& delay_out);

  std::unique_ptr<Predictor> make_predictor(CouplingVar var) const;

  ScenarioConfig config_;
  ModelSet models_;
  TrackGeometry track_;
  TerrainProfile terrain_;
  RunCase run_case_ = RunCase::kIdeal;
  std::size_t substeps_ = 10;

  MasterState master_;
  UgvState ugv_;
  LowPass2 lpf_x_;
  LowPass2 lpf_f_;
  Link forward_;
  Link backward_;
  std::unique_ptr<ScriptedOperator> operator_;
  std::unique_ptr<ScriptedOperator> manual_operator_;
  std::optional<Vec2> manual_ref_;
  std::mt19937_64 terrain_rng_;
  WheelPair slip_estimate_;
  double progress_ = 0.0;

  std::size_t k_ = 0;
  bool done_ = false;
  bool left_corridor_ = false;
  std::optional<double> completion_;
  RunLog log_;
  std::vector<TraceRow> trace_;
  std::vector<FineSample> fine_;
};

/// Builds the loop for `config`, runs it to completion and returns log,
/// trace and report.
RunResult run_case(const ScenarioConfig& config, const ModelSet& models = {});

}  // namespace teleop
