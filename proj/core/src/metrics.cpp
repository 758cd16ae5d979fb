#include "teleop/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "teleop/error.hpp"

namespace teleop {
namespace {

void require_same(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw ConfigError(std::string(what) + ": series lengths differ");
}

}  // namespace

double l2_distance(std::span<const double> a, std::span<const double> b) {
  require_same(a.size(), b.size(), "l2_distance");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(sum);
}

std::optional<double> delta_n(std::span<const double> predicted, std::span<const double> delayed,
                              std::span<const double> ideal) {
  const double den = l2_distance(delayed, ideal);
  const double num = l2_distance(predicted, ideal);
  if (den == 0.0) return std::nullopt;
  return 100.0 * num / den;
}

OmegaGamma omega_gamma(std::span<const Vec2> x_m, std::span<const Vec2> velocity,
                       std::span<const Vec2> f_h, std::span<const Vec2> f_e) {
  require_same(x_m.size(), velocity.size(), "omega_gamma");
  require_same(f_h.size(), f_e.size(), "omega_gamma");
  Vec2 om = Vec2::Zero();
  Vec2 ga = Vec2::Zero();
  for (std::size_t i = 0; i < x_m.size(); ++i) om += (x_m[i] - velocity[i]).cwiseAbs2();
  for (std::size_t i = 0; i < f_h.size(); ++i) ga += (f_h[i] - f_e[i]).cwiseAbs2();
  return {om.cwiseSqrt(), ga.cwiseSqrt(), std::sqrt(ga.sum())};
}

std::vector<Vec2> estimate_fh(std::span<const Vec2> x_m, std::span<const Vec2> u_m,
                              const HapticDeviceParams& device, double dt) {
  require_same(x_m.size(), u_m.size(), "estimate_fh");
  const Vec2 m_bar = device.equivalent_mass();
  const Vec2 c_bar = device.equivalent_damping();
  std::vector<Vec2> out;
  out.reserve(x_m.size());
  for (std::size_t i = 0; i < x_m.size(); ++i) {
    const Vec2 xdot = i ? Vec2((x_m[i] - x_m[i - 1]) / dt) : Vec2::Zero();
    out.push_back(m_bar.cwiseProduct(xdot) + c_bar.cwiseProduct(x_m[i]) - u_m[i]);
  }
  return out;
}

double rmse(std::span<const double> preds, std::span<const double> targets) {
  require_same(preds.size(), targets.size(), "rmse");
  if (preds.empty()) throw ConfigError("rmse of an empty series");
  double sum = 0.0;
  for (std::size_t i = 0; i < preds.size(); ++i) sum += (preds[i] - targets[i]) * (preds[i] - targets[i]);
  return std::sqrt(sum / static_cast<double>(preds.size()));
}

double mae(std::span<const double> preds, std::span<const double> targets) {
  require_same(preds.size(), targets.size(), "mae");
  if (preds.empty()) throw ConfigError("mae of an empty series");
  double sum = 0.0;
  for (std::size_t i = 0; i < preds.size(); ++i) sum += std::abs(preds[i] - targets[i]);
  return sum / static_cast<double>(preds.size());
}

double normalized_rmse(std::span<const double> preds, std::span<const double> targets) {
  const double r = rmse(preds, targets);
  const auto [lo, hi] = std::minmax_element(targets.begin(), targets.end());
  const double range = *hi - *lo;
  return range > 0.0 ? r / range : r;
}

std::optional<double> completion_time(std::span<const double> t, std::span<const Pose2> poses,
                                      const TrackGeometry& track) {
  require_same(t.size(), poses.size(), "completion_time");
  double s = -1.0;
  for (std::size_t i = 0; i < poses.size(); ++i) {
    const auto proj = track.project(poses[i].x, poses[i].y, s);
    if (!track.inside_corridor(proj)) return std::nullopt;
    s = std::max(0.0, proj.s);
    if (proj.s >= track.length()) return t[i];
  }
  return std::nullopt;
}

}  // namespace teleop
