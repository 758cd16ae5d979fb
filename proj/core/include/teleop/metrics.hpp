#pragma once

#include <optional>
#include <span>
#include <vector>

#include "teleop/dynamics.hpp"
#include "teleop/track.hpp"

namespace teleop {

/// Euclidean norm of a - b. Throws ConfigError on length mismatch.
double l2_distance(std::span<const double> a, std::span<const double> b);

/// 100 * |pred - ideal| / |delayed - ideal|; nullopt when delayed == ideal.
std::optional<double> delta_n(std::span<const double> predicted, std::span<const double> delayed,
                              std::span<const double> ideal);

struct OmegaGamma {
  Vec2 omega = Vec2::Zero();  ///< |x_m - (v_s, omega_s)| per axis
  Vec2 gamma = Vec2::Zero();  ///< |f_h - f_e| per axis
  double gamma_combined = 0.0;
};

OmegaGamma omega_gamma(std::span<const Vec2> x_m, std::span<const Vec2> velocity,
                       std::span<const Vec2> f_h, std::span<const Vec2> f_e);

/// f_h = M_bar x_m' + C_bar x_m - u_m with x_m' by backward difference (zero
/// for the first sample).
std::vector<Vec2> estimate_fh(std::span<const Vec2> x_m, std::span<const Vec2> u_m,
                              const HapticDeviceParams& device, double dt);

/// Throw ConfigError on empty or mismatched input.
double rmse(std::span<const double> preds, std::span<const double> targets);
double mae(std::span<const double> preds, std::span<const double> targets);

/// RMSE divided by the range of the targets (RMSE itself for a flat target).
double normalized_rmse(std::span<const double> preds, std::span<const double> targets);

/// Time at which the vehicle first crosses the end mark while inside the
/// corridor; nullopt (did not finish) if it leaves the corridor or the run
/// ends first.
std::optional<double> completion_time(std::span<const double> t, std::span<const Pose2> poses,
                                      const TrackGeometry& track);

}  // namespace teleop
