#pragma once

#include <cstdint>
#include <deque>
#include <random>
#include <string>
#include <vector>

#include "teleop/dynamics.hpp"
#include "teleop/track.hpp"

namespace teleop {

/// Scripted stand-in for a human operator holding the haptic device.
struct OperatorParams {
  double k_track = 2.0;         ///< pull towards the reference command
  double k_feel = 1.0;          ///< how strongly the felt torque is followed
  double reaction_delay = 0.3;  ///< s
  double noise_amp = 0.01;      ///< half-width of the uniform command noise
  double lookahead = 0.6;       ///< m, pure-pursuit distance
  double target_speed = 0.1;    ///< m/s
  double caution = 0.0;         ///< speed reduction per unit of command/motion mismatch
  double caution_tau = 1.0;     ///< s, smoothing of the perceived mismatch
  double pause_above = 0.05;    ///< mismatch at which the operator stops and waits
  double resume_below = 0.01;   ///< mismatch at which a paused operator drives on
  double settle_time = 4.0;     ///< s after resuming during which no new pause starts
  double force_limit = 1.0;     ///< device force clamp per axis
  std::uint64_t seed = 0;

  void validate() const;
};

struct Persona {
  std::string name;
  OperatorParams params;
};

/// Five fixed personas differing in gains, noise and seed.
std::vector<Persona> default_personas();

/// f_h = k_track (x_ref - x_m) + noise, plus k_feel u_m_felt on the linear
/// axis, clamped per axis.
Vec2 operator_step(const OperatorParams& params, const Vec2& x_ref, const Vec2& x_m,
                   const Vec2& u_m_felt, const Vec2& noise = Vec2::Zero());

struct ReferencePoint {
  double s = 0.0;
  double v = 0.0;
  double omega = 0.0;
};

/// Nominal arclength schedule: speed target_speed, angular rate
/// target_speed * curvature.
std::vector<ReferencePoint> make_reference(const TrackGeometry& track, double target_speed,
                                           double ds = 0.1);

/// Pure-pursuit reference command (speed, speed * curvature) from the current
/// pose. `progress` is the projected arclength of the vehicle.
Vec2 pursuit_reference(const TrackGeometry& track, const Pose2& pose, double progress,
                       double lookahead, double speed);

/// Stateful operator: buffers the felt torque for the reaction delay and
/// holds a noise sample for each 0.1 s slot.
class ScriptedOperator {
 public:
  ScriptedOperator(OperatorParams params, std::uint64_t run_seed, double dt = 0.01,
                   double noise_period = 0.1);

  void reset();

  /// Advances one inner step at time t.
  Vec2 step(double t, const Vec2& x_ref, const Vec2& x_m, const Vec2& u_m_now);

  /// Watches the vehicle. When its motion stops following the command the
  /// operator halts and waits for it to settle. Returns the speed the
  /// operator now aims for.
  double perceive(const Vec2& x_m, const Vec2& velocity, double dt);
  double mismatch() const { return mismatch_; }
  bool paused() const { return paused_; }

  const OperatorParams& params() const { return params_; }

 private:
  OperatorParams params_;
  std::uint64_t run_seed_;
  double dt_;
  double noise_period_;
  std::size_t delay_steps_;
  std::mt19937_64 rng_;
  std::deque<Vec2> felt_;
  Vec2 noise_ = Vec2::Zero();
  double next_noise_ = 0.0;
  double mismatch_ = 0.0;
  bool paused_ = false;
  double since_resume_ = 0.0;
};

}  // namespace teleop
