#include "teleop/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "teleop/error.hpp"

namespace teleop {
namespace {

bool finite(const Vec2& v) { return v.allFinite(); }

void require_finite(bool ok, const char* what) {
  if (!ok) throw StateIntegrityError(std::string("non-finite value in ") + what);
}

}  // namespace

void HapticDeviceParams::validate() const {
  if ((mass.array() <= 0.0).any() || (damping.array() <= 0.0).any() ||
      (b_vi.array() <= 0.0).any() || (b_p.array() <= 0.0).any()) {
    throw ConfigError("haptic device diagonal entries must be positive");
  }
  if (!(lambda_blend > 0.0 && lambda_blend < 1.0)) {
    throw ConfigError("lambda_blend must lie in (0, 1)");
  }
}

MasterState step_master(const HapticDeviceParams& params, const MasterState& state, const Vec2& u_m,
                        const Vec2& f_h, double dt) {
  require_finite(finite(state.x) && finite(state.q) && finite(state.q_dot), "master state");
  require_finite(finite(u_m) && finite(f_h) && std::isfinite(dt), "master input");
  if (dt <= 0.0) throw ConfigError("step_master: dt must be positive");

  const Vec2 m_bar = params.equivalent_mass();
  const Vec2 c_bar = params.equivalent_damping();

  MasterState next;
  next.x = state.x + dt * ((u_m + f_h - c_bar.cwiseProduct(state.x)).cwiseQuotient(m_bar));
  // q' = (x - q) / lambda, so q relaxes towards x with time constant lambda.
  next.q = state.q + dt * (state.x - state.q) / params.lambda_blend;
  next.q_dot = (next.x - next.q) / params.lambda_blend;
  return next;
}

Vec2 local_control(const HapticDeviceParams& params, const MasterState& state) {
  return params.b_vi.cwiseProduct(state.q_dot) + params.b_p.cwiseProduct(state.q);
}

void UgvParams::validate() const {
  if (!(half_track > 0.0)) throw ConfigError("half_track must be positive");
  if (!(wheel_radius > 0.0)) throw ConfigError("wheel_radius must be positive");
  if (!(v_max > 0.0)) throw ConfigError("v_max must be positive");
  if (!(omega_max > 0.0)) throw ConfigError("omega_max must be positive");
}

Eigen::Matrix2d wheel_to_body(double half_track) {
  Eigen::Matrix2d e;
  e << 0.5, 0.5, -1.0 / (2.0 * half_track), 1.0 / (2.0 * half_track);
  return e;
}

Eigen::Matrix2d body_to_wheel(double half_track) {
  Eigen::Matrix2d inv;
  inv << 1.0, -half_track, 1.0, half_track;
  return inv;
}

WheelPair to_wheels(double half_track, const Vec2& body) {
  return {body[0] - half_track * body[1], body[0] + half_track * body[1]};
}

Vec2 to_body(double half_track, const WheelPair& wheels) {
  return wheel_to_body(half_track) * Vec2(wheels.right, wheels.left);
}

TerrainProfile TerrainProfile::uniform(double phi) {
  TerrainProfile p;
  p.z = {0.0};
  p.phi = {phi};
  return p;
}

double TerrainProfile::phi_at(double z_query) const {
  if (z.size() == 1 || z_query <= z.front()) return phi.front();
  if (z_query >= z.back()) return phi.back();
  const auto it = std::upper_bound(z.begin(), z.end(), z_query);
  const auto hi = static_cast<std::size_t>(it - z.begin());
  const std::size_t lo = hi - 1;
  const double w = (z_query - z[lo]) / (z[hi] - z[lo]);
  return phi[lo] + w * (phi[hi] - phi[lo]);
}

void TerrainProfile::validate() const {
  if (z.empty() || z.size() != phi.size()) throw ConfigError("terrain knots malformed");
  for (std::size_t i = 1; i < z.size(); ++i) {
    if (!(z[i] > z[i - 1])) throw ConfigError("terrain knots must be strictly increasing in z");
  }
  if (!(phi_max > phi_min)) throw ConfigError("terrain phi_max must exceed phi_min");
  for (double p : phi) {
    if (p < phi_min - 1e-12 || p > phi_max + 1e-12) {
      throw ConfigError("terrain friction angle outside [phi_min, phi_max]");
    }
  }
  if (!(s_max >= 0.0 && s_max < 1.0)) throw ConfigError("s_max must lie in [0, 1)");
}

double slip_at(const TerrainProfile& profile, double z) {
  const double phi = std::clamp(profile.phi_at(z), profile.phi_min, profile.phi_max);
  return profile.s_max * (profile.phi_max - phi) / (profile.phi_max - profile.phi_min);
}

WheelPair ffc_compensate(const WheelPair& v_desired, const WheelPair& s_est, double v_max) {
  WheelPair cmd{v_desired.right * (1.0 + s_est.right), v_desired.left * (1.0 + s_est.left)};
  // Body speed the compensated command produces if the estimate is right.
  const double expected = 0.5 * (cmd.right / (1.0 + s_est.right) + cmd.left / (1.0 + s_est.left));
  if (std::abs(expected) > v_max) {
    const double k = v_max / std::abs(expected);
    cmd.right *= k;
    cmd.left *= k;
  }
  return cmd;
}

UgvState update_wheels(const UgvParams& params, const UgvState& state, const Vec2& u_s,
                       const TerrainProfile& profile, const WheelPair& s_est,
                       const WheelPair& slip_noise) {
  require_finite(finite(u_s), "slave command");
  require_finite(std::isfinite(s_est.right) && std::isfinite(s_est.left) &&
                     std::isfinite(slip_noise.right) && std::isfinite(slip_noise.left),
                 "slip inputs");

  UgvState next = state;
  next.desired_speed = to_wheels(params.half_track, u_s);
  next.command_speed = ffc_compensate(next.desired_speed, s_est, params.v_max);
  next.slip = {std::max(0.0, slip_at(profile, state.odometry.right) + slip_noise.right),
               std::max(0.0, slip_at(profile, state.odometry.left) + slip_noise.left)};
  next.wheel_speed = {next.command_speed.right / (1.0 + next.slip.right),
                      next.command_speed.left / (1.0 + next.slip.left)};
  const Vec2 body = to_body(params.half_track, next.wheel_speed);
  next.v_s = body[0];
  next.omega_s = body[1];
  return next;
}

UgvState advance_pose(const UgvState& state, double dt) {
  require_finite(std::isfinite(dt) && dt >= 0.0, "slave time step");
  UgvState next = state;
  next.pose.x += dt * state.v_s * std::cos(state.pose.heading);
  next.pose.y += dt * state.v_s * std::sin(state.pose.heading);
  next.pose.heading += dt * state.omega_s;
  next.odometry.right += dt * std::abs(state.wheel_speed.right);
  next.odometry.left += dt * std::abs(state.wheel_speed.left);
  require_finite(std::isfinite(next.pose.x) && std::isfinite(next.pose.y) &&
                     std::isfinite(next.pose.heading),
                 "slave pose");
  return next;
}

UgvState step_slave(const UgvParams& params, const UgvState& state, const Vec2& u_s,
                    const TerrainProfile& profile, double dt, const WheelPair& s_est,
                    const WheelPair& slip_noise) {
  return advance_pose(update_wheels(params, state, u_s, profile, s_est, slip_noise), dt);
}

Vec2 environment_force(const UgvState& state, const Vec2& u_s) {
  return u_s - Vec2(state.v_s, state.omega_s);
}

Vec2 environment_force_from_wheels(const UgvParams& params, const UgvState& state) {
  return wheel_to_body(params.half_track) *
         Vec2(state.desired_speed.right - state.wheel_speed.right,
              state.desired_speed.left - state.wheel_speed.left);
}

}  // namespace teleop
