#include <gtest/gtest.h>

#include <cmath>

#include "teleop/error.hpp"
#include "teleop/operator.hpp"

using namespace teleop;

TEST(OperatorStep, TrackingPlusFeelOnLinearAxis) {
  OperatorParams p;
  p.k_track = 2.0;
  p.k_feel = 1.5;
  const Vec2 f = operator_step(p, Vec2(0.1, 0.2), Vec2(0.05, 0.1), Vec2(-0.02, 0.3), Vec2(0.001, 0.0));
  EXPECT_NEAR(f[0], 2.0 * 0.05 + 1.5 * -0.02 + 0.001, 1e-15);
  EXPECT_NEAR(f[1], 2.0 * 0.1, 1e-15);
}

TEST(OperatorStep, ClampsForce) {
  OperatorParams p;
  p.force_limit = 0.1;
  const Vec2 f = operator_step(p, Vec2(5.0, -5.0), Vec2::Zero(), Vec2::Zero());
  EXPECT_DOUBLE_EQ(f[0], 0.1);
  EXPECT_DOUBLE_EQ(f[1], -0.1);
}

TEST(Personas, FiveDistinctAndValid) {
  const auto ps = default_personas();
  ASSERT_EQ(ps.size(), 5u);
  for (std::size_t i = 0; i < ps.size(); ++i) {
    EXPECT_NO_THROW(ps[i].params.validate());
    for (std::size_t j = 0; j < i; ++j) EXPECT_NE(ps[i].params.seed, ps[j].params.seed);
  }
}

TEST(Params, ValidateRejectsInvertedHysteresis) {
  OperatorParams p;
  p.pause_above = 0.01;
  p.resume_below = 0.02;
  EXPECT_THROW(p.validate(), ConfigError);
}

TEST(Pursuit, StraightAheadHasNoTurn) {
  const TrackGeometry g(track_a());
  const Vec2 r = pursuit_reference(g, {1.0, 0.0, 0.0}, 1.0, 0.6, 0.1);
  EXPECT_DOUBLE_EQ(r[0], 0.1);
  EXPECT_NEAR(r[1], 0.0, 1e-12);
}

TEST(Pursuit, OffsetSteersBack) {
  const TrackGeometry g(track_a());
  // Left of the centerline: goal lies to the right, so turn clockwise.
  const Vec2 r = pursuit_reference(g, {1.0, 0.3, 0.0}, 1.0, 0.6, 0.1);
  const double dx = 0.6, dy = -0.3;
  const double kappa = 2.0 * std::sin(std::atan2(dy, dx)) / std::hypot(dx, dy);
  EXPECT_NEAR(r[1], 0.1 * kappa, 1e-9);
  EXPECT_LT(r[1], 0.0);
}

TEST(Reference, ScheduleFollowsCurvature) {
  const TrackGeometry g(track_b());
  const auto ref = make_reference(g, 0.1);
  EXPECT_NEAR(ref.front().omega, 0.0, 1e-15);
  EXPECT_NEAR(ref[25].omega, 0.1 * -1.0 / 1.5, 1e-12);
}

TEST(Scripted, ReactionDelayBuffersFeltTorque) {
  OperatorParams p;
  p.noise_amp = 0.0;
  p.k_track = 0.0;
  p.k_feel = 1.0;
  p.reaction_delay = 0.03;
  ScriptedOperator op(p, 1, 0.01);
  EXPECT_DOUBLE_EQ(op.step(0.00, Vec2::Zero(), Vec2::Zero(), Vec2(0.5, 0.0))[0], 0.0);
  EXPECT_DOUBLE_EQ(op.step(0.01, Vec2::Zero(), Vec2::Zero(), Vec2(0.6, 0.0))[0], 0.0);
  EXPECT_DOUBLE_EQ(op.step(0.02, Vec2::Zero(), Vec2::Zero(), Vec2(0.7, 0.0))[0], 0.0);
  EXPECT_DOUBLE_EQ(op.step(0.03, Vec2::Zero(), Vec2::Zero(), Vec2(0.8, 0.0))[0], 0.5);
}

TEST(Scripted, NoiseHeldPerSlotAndBounded) {
  OperatorParams p;
  p.k_track = 0.0;
  p.k_feel = 0.0;
  p.noise_amp = 0.05;
  ScriptedOperator op(p, 3, 0.01, 0.1);
  const Vec2 first = op.step(0.0, Vec2::Zero(), Vec2::Zero(), Vec2::Zero());
  for (int k = 1; k < 10; ++k) {
    EXPECT_EQ(op.step(0.01 * k, Vec2::Zero(), Vec2::Zero(), Vec2::Zero()), first);
  }
  const Vec2 next = op.step(0.1, Vec2::Zero(), Vec2::Zero(), Vec2::Zero());
  EXPECT_NE(next, first);
  EXPECT_LE(next.cwiseAbs().maxCoeff(), 0.05);
}

TEST(Scripted, PausesOnMismatchAndResumesWhenSettled) {
  OperatorParams p;
  p.caution_tau = 0.1;
  p.pause_above = 0.05;
  p.resume_below = 0.01;
  p.settle_time = 1.0;
  ScriptedOperator op(p, 1);
  EXPECT_DOUBLE_EQ(op.perceive(Vec2(0.1, 0.0), Vec2(0.1, 0.0), 0.1), p.target_speed);
  EXPECT_DOUBLE_EQ(op.perceive(Vec2(0.1, 0.0), Vec2(0.0, 0.0), 0.1), 0.0);  // mismatch 0.1
  EXPECT_TRUE(op.paused());
  EXPECT_DOUBLE_EQ(op.perceive(Vec2(0.0, 0.0), Vec2(0.0, 0.0), 0.1), p.target_speed);
  EXPECT_FALSE(op.paused());
  // Within the settle time a new mismatch does not stop the operator.
  EXPECT_DOUBLE_EQ(op.perceive(Vec2(0.1, 0.0), Vec2(0.0, 0.0), 0.1), p.target_speed);
  for (int k = 0; k < 10; ++k) op.perceive(Vec2(0.1, 0.0), Vec2(0.0, 0.0), 0.1);
  EXPECT_TRUE(op.paused());
}

TEST(Scripted, ResetReplaysNoise) {
  OperatorParams p;
  ScriptedOperator op(p, 9);
  std::vector<Vec2> a;
  for (int k = 0; k < 50; ++k) a.push_back(op.step(0.01 * k, Vec2(0.1, 0.0), Vec2::Zero(), Vec2::Zero()));
  op.reset();
  for (int k = 0; k < 50; ++k) {
    EXPECT_EQ(op.step(0.01 * k, Vec2(0.1, 0.0), Vec2::Zero(), Vec2::Zero()), a[static_cast<std::size_t>(k)]);
  }
}
