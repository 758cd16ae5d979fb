#pragma once

#include <optional>

#include "teleop/bridge/protocol.hpp"
#include "teleop/simulation.hpp"

namespace teleop::bridge {

/// Simulation driven by a remote human instead of the scripted operator.
/// Time is simulation time; the server paces step() to the wall clock.
class Session {
 public:
  /// `deadman`: seconds without a command after which the input falls to zero.
  explicit Session(ScenarioConfig config, ModelSet models = {}, double deadman = 0.25);

  /// Applies one decoded client message. A mode message restarts the run.
  void handle(const ClientMessage& msg);

  /// The controlling client went away: input drops to zero at once.
  void release();

  /// Advances one sample period and returns the frame describing it.
  StateFrame step();

  RunCase mode() const { return sim_.run_case(); }
  double time() const { return sim_.time(); }
  const TeleopSimulation& simulation() const { return sim_; }

 private:
  void restart(RunCase mode);

  TeleopSimulation sim_;
  double deadman_;
  Vec2 input_ = Vec2::Zero();
  std::optional<double> last_command_;
  std::uint64_t last_seq_ = 0;
  std::uint64_t frame_seq_ = 0;
  Vec2 omega_sq_ = Vec2::Zero();
  Vec2 gamma_sq_ = Vec2::Zero();
};

}  // namespace teleop::bridge
