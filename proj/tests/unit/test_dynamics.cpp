#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "teleop/dynamics.hpp"
#include "teleop/error.hpp"

using namespace teleop;

namespace {

// Scalar exact solution of m x' + c x = u from rest.
double first_order_response(double m, double c, double u, double t) {
  return u / c * (1.0 - std::exp(-c / m * t));
}

}  // namespace

TEST(Master, ConstantForceApproachesAnalyticResponse) {
  HapticDeviceParams p;
  MasterState s;
  const Vec2 f_h(0.05, -0.02);
  const double dt = 1e-4;
  for (int k = 0; k < 20000; ++k) s = step_master(p, s, Vec2::Zero(), f_h, dt);
  const Vec2 m = p.equivalent_mass(), c = p.equivalent_damping();
  for (int i = 0; i < 2; ++i) {
    EXPECT_NEAR(s.x[i], first_order_response(m[i], c[i], f_h[i], 2.0), 2e-4 * std::abs(f_h[i] / c[i]));
  }
}

TEST(Master, SingleStepMatchesScalarEuler) {
  HapticDeviceParams p;
  p.mass = {0.04, 0.05};
  p.damping = {0.03, 0.01};
  p.lambda_blend = 0.2;
  MasterState s;
  s.x = {0.1, -0.3};
  s.q = {0.05, 0.02};
  const Vec2 u(0.2, 0.1), f(-0.1, 0.3);
  const MasterState n = step_master(p, s, u, f, 0.01);
  for (int i = 0; i < 2; ++i) {
    const double mb = p.mass[i] / 0.2, cb = p.damping[i] / 0.2;
    EXPECT_DOUBLE_EQ(n.x[i], s.x[i] + 0.01 * (u[i] + f[i] - cb * s.x[i]) / mb);
    EXPECT_NEAR(0.2 * n.q_dot[i] + n.q[i], n.x[i], 1e-15);
  }
}

TEST(Master, RejectsNonFiniteInput) {
  HapticDeviceParams p;
  EXPECT_THROW(step_master(p, {}, Vec2(NAN, 0.0), Vec2::Zero(), 0.01), StateIntegrityError);
  EXPECT_THROW(step_master(p, {}, Vec2::Zero(), Vec2::Zero(), 0.0), ConfigError);
}

TEST(Master, ValidateRejectsBadBlend) {
  HapticDeviceParams p;
  p.lambda_blend = 1.0;
  EXPECT_THROW(p.validate(), ConfigError);
  p.lambda_blend = 0.1;
  p.mass[1] = 0.0;
  EXPECT_THROW(p.validate(), ConfigError);
}

TEST(Kinematics, WheelBodyMapsAreInverse) {
  const double b = 0.25;
  const Eigen::Matrix2d prod = wheel_to_body(b) * body_to_wheel(b);
  EXPECT_TRUE(prod.isApprox(Eigen::Matrix2d::Identity(), 1e-15));
  const WheelPair w = to_wheels(b, Vec2(0.1, 0.4));
  EXPECT_DOUBLE_EQ(w.right, 0.1 - 0.25 * 0.4);
  EXPECT_DOUBLE_EQ(w.left, 0.1 + 0.25 * 0.4);
}

TEST(Slip, LinearInFrictionAngle) {
  TerrainProfile t;
  t.z = {0.0, 10.0};
  t.phi = {0.95, 0.50};
  EXPECT_DOUBLE_EQ(slip_at(t, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(slip_at(t, 10.0), 0.6);
  EXPECT_NEAR(slip_at(t, 5.0), 0.3, 1e-15);
  EXPECT_DOUBLE_EQ(slip_at(t, 50.0), 0.6);
}

TEST(Slip, TerrainValidation) {
  TerrainProfile t;
  t.z = {0.0, 0.0};
  t.phi = {0.9, 0.8};
  EXPECT_THROW(t.validate(), ConfigError);
  t.z = {0.0, 1.0};
  t.phi = {0.9, 0.3};
  EXPECT_THROW(t.validate(), ConfigError);
}

TEST(Slip, RealizedSpeedFollowsSlipRatio) {
  UgvParams p;
  const TerrainProfile t = TerrainProfile::uniform(0.725);  // s = 0.3
  const UgvState s = update_wheels(p, {}, Vec2(0.08, 0.0), t);
  EXPECT_NEAR(s.slip.right, 0.3, 1e-15);
  EXPECT_NEAR(s.wheel_speed.right, 0.08 / 1.3, 1e-15);
  EXPECT_NEAR(s.v_s, 0.08 / 1.3, 1e-15);
  EXPECT_NEAR(environment_force(s, Vec2(0.08, 0.0))[0], 0.08 - 0.08 / 1.3, 1e-15);
}

TEST(Slip, PerfectCompensationRestoresCommand) {
  UgvParams p;
  const TerrainProfile t = TerrainProfile::uniform(0.725);
  const UgvState s = update_wheels(p, {}, Vec2(0.05, 0.1), t, {0.3, 0.3});
  EXPECT_NEAR(s.v_s, 0.05, 1e-15);
  EXPECT_NEAR(s.omega_s, 0.1, 1e-14);
}

TEST(Slip, CompensationRespectsSpeedLimit) {
  const WheelPair cmd = ffc_compensate({0.1, 0.1}, {0.5, 0.5}, 0.08);
  EXPECT_NEAR(0.5 * (cmd.right / 1.5 + cmd.left / 1.5), 0.08, 1e-15);
}

TEST(Pose, ArcMatchesClosedForm) {
  UgvState s;
  s.v_s = 0.1;
  s.omega_s = 0.2;
  const double dt = 1e-4;
  for (int k = 0; k < 50000; ++k) s = advance_pose(s, dt);
  const double r = 0.5, th = 0.2 * 5.0;
  EXPECT_NEAR(s.pose.x, r * std::sin(th), 1e-4);
  EXPECT_NEAR(s.pose.y, r * (1.0 - std::cos(th)), 1e-4);
  EXPECT_NEAR(s.pose.heading, th, 1e-12);
}

TEST(Pose, OdometryAccumulatesWheelDistance) {
  UgvParams p;
  UgvState s;
  for (int k = 0; k < 100; ++k) {
    s = step_slave(p, s, Vec2(0.1, 0.0), TerrainProfile::uniform(0.95), 0.01);
  }
  EXPECT_NEAR(s.odometry.right, 0.1, 1e-12);
  EXPECT_NEAR(s.pose.x, 0.1, 1e-12);
}
