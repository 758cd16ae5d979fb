#pragma once

#include <Eigen/Core>
#include <vector>

namespace teleop {

using Vec2 = Eigen::Vector2d;

/// Right/left pair for per-wheel quantities.
struct WheelPair {
  double right = 0.0;
  double left = 0.0;

  friend bool operator==(const WheelPair&, const WheelPair&) = default;
};

// ---------------------------------------------------------------------------
// Haptic master
// ---------------------------------------------------------------------------

/// Reduced two-joint haptic device. Raw mass/damping are the joint-space
/// values; the integrator works on the blended variable x = lambda*q_dot + q,
/// whose coefficients are the raw ones divided by lambda.
struct HapticDeviceParams {
  Vec2 mass{0.03, 0.03};
  Vec2 damping{0.02, 0.02};
  double lambda_blend = 0.1;
  Vec2 b_vi{0.5, 0.5};
  Vec2 b_p{0.5, 0.5};

  Vec2 equivalent_mass() const { return mass / lambda_blend; }
  Vec2 equivalent_damping() const { return damping / lambda_blend; }

  /// Throws ConfigError unless every diagonal entry is positive and
  /// 0 < lambda_blend < 1.
  void validate() const;
};

struct MasterState {
  Vec2 x = Vec2::Zero();      ///< blended motion command (x_mv, x_momega)
  Vec2 q = Vec2::Zero();      ///< raw joint position
  Vec2 q_dot = Vec2::Zero();  ///< raw joint velocity
};

/// One explicit Euler step of  M_bar x' + C_bar x = u_m + f_h.
/// q and q_dot are advanced so that x == lambda*q_dot + q holds afterwards.
MasterState step_master(const HapticDeviceParams& params, const MasterState& state, const Vec2& u_m,
                        const Vec2& f_h, double dt);

/// Local joint controller B_vi*q_dot + B_p*q. Reported for logging only; the
/// first-order master model already contains its effect.
Vec2 local_control(const HapticDeviceParams& params, const MasterState& state);

// ---------------------------------------------------------------------------
// Slipping differential-drive slave
// ---------------------------------------------------------------------------

struct UgvParams {
  double half_track = 0.25;  ///< b: half the wheel separation (m)
  double wheel_radius = 0.1;
  double v_max = 0.1;
  double omega_max = 0.5;  ///< rad/s turn-rate limit of the drive

  void validate() const;
};

/// E(b) mapping wheel rim speeds (v_r, v_l) to body rates (v, omega), taken
/// literally: omega = (v_l - v_r) / (2b).
Eigen::Matrix2d wheel_to_body(double half_track);
Eigen::Matrix2d body_to_wheel(double half_track);

WheelPair to_wheels(double half_track, const Vec2& body);
Vec2 to_body(double half_track, const WheelPair& wheels);

struct Pose2 {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
};

struct UgvState {
  double v_s = 0.0;
  double omega_s = 0.0;
  Pose2 pose;
  WheelPair wheel_speed;    ///< realized rim speeds v_r, v_l
  WheelPair desired_speed;  ///< E(b)^-1 u_s, before slip compensation
  WheelPair command_speed;  ///< sent to the wheel motors, after compensation
  WheelPair slip;           ///< s = (command - realized) / realized, >= 0
  WheelPair odometry;       ///< distance rolled by each wheel (m)
};

/// Internal friction angle along the track, piecewise linear in arclength z.
struct TerrainProfile {
  std::vector<double> z{0.0};
  std::vector<double> phi{0.95};
  double phi_min = 0.50;
  double phi_max = 0.95;
  double s_max = 0.6;

  static TerrainProfile uniform(double phi);

  /// Clamped to the end knots outside [z.front(), z.back()].
  double phi_at(double z_query) const;
  void validate() const;
};

/// s = s_max * (phi_max - phi(z)) / (phi_max - phi_min).
double slip_at(const TerrainProfile& profile, double z);

/// Feedforward slip compensation: command = desired * (1 + s_est), scaled down
/// when the body speed expected under the estimate would exceed v_max.
WheelPair ffc_compensate(const WheelPair& v_desired, const WheelPair& s_est, double v_max);

/// Recomputes wheel and body speeds for command u_s at the current position
/// without advancing time. `slip_noise` is added to the terrain slip before
/// clamping at zero.
UgvState update_wheels(const UgvParams& params, const UgvState& state, const Vec2& u_s,
                       const TerrainProfile& profile, const WheelPair& s_est = {},
                       const WheelPair& slip_noise = {});

/// Integrates pose and wheel odometry over dt with the current speeds.
UgvState advance_pose(const UgvState& state, double dt);

/// update_wheels followed by advance_pose.
UgvState step_slave(const UgvParams& params, const UgvState& state, const Vec2& u_s,
                    const TerrainProfile& profile, double dt, const WheelPair& s_est = {},
                    const WheelPair& slip_noise = {});

/// Induced velocity loss f_e = u_s - (v_s, omega_s).
Vec2 environment_force(const UgvState& state, const Vec2& u_s);

/// Same quantity through the wheels: E(b) * (desired - realized).
Vec2 environment_force_from_wheels(const UgvParams& params, const UgvState& state);

}  // namespace teleop
