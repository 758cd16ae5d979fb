#include "teleop/track.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "teleop/error.hpp"

namespace teleop {
namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

Pose2 advance_along(const Pose2& p, double kappa, double ds) {
  Pose2 out;
  out.heading = p.heading + kappa * ds;
  if (std::abs(kappa) < 1e-12) {
    out.x = p.x + ds * std::cos(p.heading);
    out.y = p.y + ds * std::sin(p.heading);
  } else {
    out.x = p.x + (std::sin(out.heading) - std::sin(p.heading)) / kappa;
    out.y = p.y - (std::cos(out.heading) - std::cos(p.heading)) / kappa;
  }
  return out;
}

}  // namespace

TrackSegment TrackSegment::arc(double radius, double angle_rad) {
  return {radius * std::abs(angle_rad), (angle_rad < 0.0 ? -1.0 : 1.0) / radius};
}

double TrackSpec::length() const {
  double total = 0.0;
  for (const auto& s : segments) total += s.length;
  return total;
}

void TrackSpec::validate() const {
  if (segments.empty()) throw ConfigError("track '" + id + "' has no segments");
  for (const auto& s : segments) {
    if (!(s.length > 0.0) || !std::isfinite(s.curvature)) {
      throw ConfigError("track '" + id + "' has a degenerate segment");
    }
  }
  if (!(width > 0.0)) throw ConfigError("track width must be positive");
  terrain.validate();
}

TrackGeometry::TrackGeometry(TrackSpec spec, double spacing)
    : spec_(std::move(spec)), length_(spec_.length()), spacing_(spacing) {
  spec_.validate();
  Pose2 p;
  double s = 0.0;
  for (const auto& seg : spec_.segments) {
    seg_start_.push_back(s);
    seg_pose_.push_back(p);
    p = advance_along(p, seg.curvature, seg.length);
    s += seg.length;
  }
  const auto count = static_cast<std::size_t>(std::ceil(length_ / spacing_));
  samples_.reserve(count + 1);
  for (std::size_t i = 0; i <= count; ++i) {
    samples_.push_back(pose_at(std::min(length_, static_cast<double>(i) * spacing_)));
  }
}

Pose2 TrackGeometry::pose_at(double s) const {
  if (s <= 0.0) return advance_along(seg_pose_.front(), 0.0, s);
  if (s >= length_) {
    const auto& last = spec_.segments.back();
    const Pose2 end = advance_along(seg_pose_.back(), last.curvature, last.length);
    return advance_along(end, 0.0, s - length_);
  }
  const auto it = std::upper_bound(seg_start_.begin(), seg_start_.end(), s);
  const auto i = static_cast<std::size_t>(it - seg_start_.begin()) - 1;
  return advance_along(seg_pose_[i], spec_.segments[i].curvature, s - seg_start_[i]);
}

double TrackGeometry::curvature_at(double s) const {
  if (s < 0.0 || s >= length_) return 0.0;
  const auto it = std::upper_bound(seg_start_.begin(), seg_start_.end(), s);
  return spec_.segments[static_cast<std::size_t>(it - seg_start_.begin()) - 1].curvature;
}

TrackProjection TrackGeometry::project(double x, double y, double s_hint, double back,
                                       double ahead) const {
  std::size_t lo = 0;
  std::size_t hi = samples_.size() - 1;
  if (s_hint >= 0.0) {
    lo = static_cast<std::size_t>(std::max(0.0, (s_hint - back) / spacing_));
    hi = std::min(hi, static_cast<std::size_t>(std::max(0.0, (s_hint + ahead) / spacing_)) + 1);
    lo = std::min(lo, hi);
  }
  std::size_t best = lo;
  double best_d2 = INFINITY;
  for (std::size_t i = lo; i <= hi; ++i) {
    const double dx = x - samples_[i].x;
    const double dy = y - samples_[i].y;
    const double d2 = dx * dx + dy * dy;
    if (d2 < best_d2) {
      best_d2 = d2;
      best = i;
    }
  }
  const Pose2& p = samples_[best];
  const double c = std::cos(p.heading);
  const double sn = std::sin(p.heading);
  const double dx = x - p.x;
  const double dy = y - p.y;
  double along = dx * c + dy * sn;
  const double s_best = std::min(length_, static_cast<double>(best) * spacing_);
  // Within the sampled range the tangential correction is at most half a spacing.
  if (best != 0 && best != samples_.size() - 1) {
    along = std::clamp(along, -spacing_, spacing_);
  } else if (best == 0) {
    along = std::min(along, spacing_);
  } else {
    along = std::max(along, -spacing_);
  }
  return {s_best + along, -dx * sn + dy * c};
}

TrackSpec track_a() {
  TrackSpec t;
  t.id = "A";
  t.segments = {TrackSegment::straight(10.0)};
  t.terrain.z = {0.0, 1.5, 2.5, 4.0, 5.0, 6.5, 7.5, 8.5, 9.5};
  t.terrain.phi = {0.95, 0.95, 0.55, 0.55, 0.95, 0.95, 0.60, 0.60, 0.95};
  return t;
}

TrackSpec track_b() {
  TrackSpec t;
  t.id = "B";
  const double r = 1.5;
  const double straight = (10.0 - 2.0 * r * kHalfPi - 2.0) / 2.0;
  t.segments = {TrackSegment::straight(2.0), TrackSegment::arc(r, -kHalfPi),
                TrackSegment::straight(straight), TrackSegment::arc(r, -kHalfPi),
                TrackSegment::straight(straight)};
  t.terrain.z = {0.0, 1.0, 2.0, 3.5, 4.5, 5.5, 6.5, 7.5, 8.5};
  t.terrain.phi = {0.95, 0.95, 0.55, 0.55, 0.95, 0.95, 0.60, 0.60, 0.95};
  return t;
}

TrackSpec track_c() {
  TrackSpec t;
  t.id = "C";
  const double r = 1.5;
  t.segments = {TrackSegment::straight(2.0), TrackSegment::arc(r, -kHalfPi),
                TrackSegment::straight(1.0),  TrackSegment::arc(r, kHalfPi),
                TrackSegment::straight(1.0),  TrackSegment::arc(r, -kHalfPi),
                TrackSegment::straight(1.0)};
  t.terrain.z = {0.0, 1.0, 2.0, 3.5, 4.5, 6.0, 7.0, 8.5, 9.5};
  t.terrain.phi = {0.95, 0.95, 0.55, 0.55, 0.95, 0.95, 0.60, 0.60, 0.95};
  return t;
}

TrackSpec track_mixed() {
  TrackSpec t;
  t.id = "mixed";
  const double d = std::numbers::pi / 180.0;
  t.segments = {
      TrackSegment::straight(3.0),        TrackSegment::arc(2.0, -60 * d),
      TrackSegment::straight(2.0),        TrackSegment::arc(1.5, 90 * d),
      TrackSegment::straight(1.5),        TrackSegment::arc(3.0, -45 * d),
      TrackSegment::arc(2.5, 45 * d),     TrackSegment::straight(2.5),
      TrackSegment::arc(1.5, -90 * d),    TrackSegment::straight(1.0),
      TrackSegment::arc(2.0, -30 * d),    TrackSegment::straight(3.0),
      TrackSegment::arc(1.8, 120 * d),    TrackSegment::straight(2.0),
      TrackSegment::arc(4.0, -30 * d),    TrackSegment::straight(1.5),
      TrackSegment::arc(1.5, -90 * d),    TrackSegment::straight(2.0),
      TrackSegment::arc(2.2, 70 * d),     TrackSegment::straight(4.0),
  };
  // Alternating firm ground and sand of varying softness every few metres.
  const double phi_cycle[] = {0.95, 0.95, 0.55, 0.62, 0.95, 0.95, 0.70, 0.50, 0.90, 0.95, 0.58, 0.75};
  const double len = t.length();
  t.terrain.z.clear();
  t.terrain.phi.clear();
  for (std::size_t i = 0; 1.1 * static_cast<double>(i) <= len + 1.1; ++i) {
    t.terrain.z.push_back(1.1 * static_cast<double>(i));
    t.terrain.phi.push_back(phi_cycle[i % std::size(phi_cycle)]);
  }
  return t;
}

TrackSpec make_track(const std::string& id) {
  if (id == "A") return track_a();
  if (id == "B") return track_b();
  if (id == "C") return track_c();
  if (id == "mixed") return track_mixed();
  throw ConfigError("unknown track '" + id + "'");
}

}  // namespace teleop
