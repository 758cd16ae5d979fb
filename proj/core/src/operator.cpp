#include "teleop/operator.hpp"

#include <algorithm>
#include <cmath>

#include "teleop/error.hpp"
#include "teleop/rng.hpp"

namespace teleop {

void OperatorParams::validate() const {
  if (k_track < 0.0 || k_feel < 0.0 || caution < 0.0 || !(caution_tau > 0.0) ||
      resume_below < 0.0 || !(pause_above > resume_below) || settle_time < 0.0) {
    throw ConfigError("operator gains must be non-negative");
  }
  if (reaction_delay < 0.0) throw ConfigError("operator reaction delay must be non-negative");
  if (noise_amp < 0.0) throw ConfigError("operator noise amplitude must be non-negative");
  if (!(lookahead > 0.0)) throw ConfigError("operator lookahead must be positive");
  if (!(target_speed >= 0.0)) throw ConfigError("operator target speed must be non-negative");
  if (!(force_limit > 0.0)) throw ConfigError("operator force limit must be positive");
}

std::vector<Persona> default_personas() {
  std::vector<Persona> out;
  auto add = [&](const char* name, double k_track, double k_feel, double noise, double lookahead,
                 std::uint64_t seed) {
    OperatorParams p;
    p.k_track = k_track;
    p.k_feel = k_feel;
    p.noise_amp = noise;
    p.lookahead = lookahead;
    p.seed = seed;
    out.push_back({name, p});
  };
  add("operator1", 2.0, 2.0, 0.010, 0.6, 101);
  add("operator2", 1.6, 1.6, 0.015, 0.7, 202);
  add("operator3", 2.4, 2.4, 0.008, 0.5, 303);
  add("operator4", 1.8, 1.2, 0.020, 0.8, 404);
  add("operator5", 2.2, 2.8, 0.012, 0.6, 505);
  return out;
}

Vec2 operator_step(const OperatorParams& params, const Vec2& x_ref, const Vec2& x_m,
                   const Vec2& u_m_felt, const Vec2& noise) {
  Vec2 f = params.k_track * (x_ref - x_m) + noise;
  f[0] += params.k_feel * u_m_felt[0];
  return f.cwiseMax(-params.force_limit).cwiseMin(params.force_limit);
}

std::vector<ReferencePoint> make_reference(const TrackGeometry& track, double target_speed,
                                           double ds) {
  if (!(ds > 0.0)) throw ConfigError("reference spacing must be positive");
  std::vector<ReferencePoint> out;
  for (double s = 0.0; s <= track.length() + 1e-9; s += ds) {
    out.push_back({s, target_speed, target_speed * track.curvature_at(s)});
  }
  return out;
}

Vec2 pursuit_reference(const TrackGeometry& track, const Pose2& pose, double progress,
                       double lookahead, double speed) {
  const Pose2 goal = track.pose_at(progress + lookahead);
  const double dx = goal.x - pose.x;
  const double dy = goal.y - pose.y;
  const double dist = std::hypot(dx, dy);
  const double alpha = std::atan2(dy, dx) - pose.heading;
  const double kappa = dist > 1e-9 ? 2.0 * std::sin(alpha) / dist : 0.0;
  return {speed, speed * kappa};
}

ScriptedOperator::ScriptedOperator(OperatorParams params, std::uint64_t run_seed, double dt,
                                   double noise_period)
    : params_(params),
      run_seed_(run_seed),
      dt_(dt),
      noise_period_(noise_period),
      delay_steps_(static_cast<std::size_t>(std::lround(params.reaction_delay / dt))) {
  params_.validate();
  reset();
}

void ScriptedOperator::reset() {
  rng_ = make_rng(run_seed_, RngStream::kOperator, params_.seed);
  felt_.clear();
  noise_.setZero();
  next_noise_ = 0.0;
  mismatch_ = 0.0;
  paused_ = false;
  since_resume_ = params_.settle_time;
}

double ScriptedOperator::perceive(const Vec2& x_m, const Vec2& velocity, double dt) {
  const double e = (x_m - velocity).cwiseAbs().sum();
  mismatch_ += std::min(1.0, dt / params_.caution_tau) * (e - mismatch_);
  since_resume_ += dt;
  if (!paused_ && since_resume_ >= params_.settle_time && mismatch_ > params_.pause_above) {
    paused_ = true;
  } else if (paused_ && mismatch_ < params_.resume_below) {
    paused_ = false;
    since_resume_ = 0.0;
  }
  if (paused_) return 0.0;
  return params_.target_speed / (1.0 + params_.caution * mismatch_);
}

Vec2 ScriptedOperator::step(double t, const Vec2& x_ref, const Vec2& x_m, const Vec2& u_m_now) {
  if (t + 1e-9 >= next_noise_) {
    noise_ = {uniform(rng_, -params_.noise_amp, params_.noise_amp),
              uniform(rng_, -params_.noise_amp, params_.noise_amp)};
    next_noise_ += noise_period_;
  }
  felt_.push_back(u_m_now);
  Vec2 felt = Vec2::Zero();
  if (felt_.size() > delay_steps_) {
    felt = felt_.front();
    felt_.pop_front();
  }
  return operator_step(params_, x_ref, x_m, felt, noise_);
}

}  // namespace teleop
