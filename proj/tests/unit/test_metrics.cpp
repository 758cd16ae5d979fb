#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "teleop/error.hpp"
#include "teleop/metrics.hpp"

using namespace teleop;

TEST(DeltaN, IdentityPassthroughIsHundred) {
  const std::vector<double> ideal{0.0, 1.0, 2.0, 3.0}, delayed{0.0, 0.0, 1.0, 2.0};
  EXPECT_DOUBLE_EQ(*delta_n(delayed, delayed, ideal), 100.0);
  EXPECT_DOUBLE_EQ(*delta_n(ideal, delayed, ideal), 0.0);
  EXPECT_FALSE(delta_n(ideal, ideal, ideal));
}

TEST(DeltaN, RatioOfDistances) {
  const std::vector<double> ideal{1.0, 1.0}, delayed{4.0, 5.0}, pred{1.0, 2.0};
  EXPECT_DOUBLE_EQ(*delta_n(pred, delayed, ideal), 100.0 * 1.0 / 5.0);
  EXPECT_THROW(delta_n(pred, std::vector<double>{1.0}, ideal), ConfigError);
}

TEST(Errors, RmseMaeAndNormalized) {
  const std::vector<double> p{1.0, 2.0, 3.0, 4.0}, t{1.0, 1.0, 3.0, 6.0};
  EXPECT_DOUBLE_EQ(rmse(p, t), std::sqrt((1.0 + 4.0) / 4.0));
  EXPECT_DOUBLE_EQ(mae(p, t), 3.0 / 4.0);
  EXPECT_DOUBLE_EQ(normalized_rmse(p, t), std::sqrt(5.0 / 4.0) / 5.0);
  const std::vector<double> flat{2.0, 2.0};
  EXPECT_DOUBLE_EQ(normalized_rmse(std::vector<double>{1.0, 3.0}, flat), 1.0);
  EXPECT_THROW(rmse(std::vector<double>{}, std::vector<double>{}), ConfigError);
}

TEST(OmegaGamma, PerAxisEuclideanNorms) {
  const std::vector<Vec2> x{{1.0, 0.0}, {2.0, 1.0}}, v{{0.0, 0.0}, {0.0, 0.0}};
  const std::vector<Vec2> fh{{0.0, 3.0}, {0.0, 0.0}}, fe{{0.0, 0.0}, {0.0, 4.0}};
  const OmegaGamma og = omega_gamma(x, v, fh, fe);
  EXPECT_DOUBLE_EQ(og.omega[0], std::sqrt(5.0));
  EXPECT_DOUBLE_EQ(og.omega[1], 1.0);
  EXPECT_DOUBLE_EQ(og.gamma[0], 0.0);
  EXPECT_DOUBLE_EQ(og.gamma[1], 5.0);
  EXPECT_DOUBLE_EQ(og.gamma_combined, 5.0);
}

TEST(EstimateFh, InvertsMasterModel) {
  // Integrate the master with a known f_h and check that the estimate
  // recovers it from x_m and u_m alone.
  HapticDeviceParams dev;
  const double dt = 0.01;
  MasterState s;
  std::vector<Vec2> xs, us, fh;
  for (int k = 0; k < 200; ++k) {
    const Vec2 u(-0.02 * std::sin(0.05 * k), 0.01);
    const Vec2 f(0.05 + 0.01 * std::cos(0.1 * k), -0.02);
    const MasterState next = step_master(dev, s, u, f, dt);
    // The estimate at sample k+1 uses the backward difference x_{k+1} - x_k,
    // which is the forward-Euler slope of step k: it sees u_k and f_k exactly
    // up to the damping term evaluated one sample late.
    xs.push_back(next.x);
    us.push_back(u);
    fh.push_back(f);
    s = next;
  }
  const auto est = estimate_fh(xs, us, dev, dt);
  const Vec2 c = dev.equivalent_damping();
  for (std::size_t k = 1; k < xs.size(); ++k) {
    const Vec2 expected = fh[k] + c.cwiseProduct(xs[k] - xs[k - 1]);
    EXPECT_NEAR(est[k][0], expected[0], 1e-12);
    EXPECT_NEAR(est[k][1], expected[1], 1e-12);
  }
}

TEST(Completion, FirstCrossingInsideCorridor) {
  const TrackGeometry track(track_a());
  std::vector<double> t;
  std::vector<Pose2> poses;
  for (int k = 0; k <= 120; ++k) {
    t.push_back(0.1 * k);
    poses.push_back({0.1 * k, 0.2, 0.0});
  }
  EXPECT_NEAR(*completion_time(t, poses, track), 10.0, 1e-9);
  poses[50].y = 1.5;
  EXPECT_FALSE(completion_time(t, poses, track));
}
