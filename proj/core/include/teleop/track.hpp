#pragma once

#include <string>
#include <vector>

#include "teleop/dynamics.hpp"

namespace teleop {

/// Constant-curvature piece of centerline. Negative curvature turns right.
struct TrackSegment {
  double length = 0.0;
  double curvature = 0.0;

  static TrackSegment straight(double length) { return {length, 0.0}; }
  /// Arc through `angle_rad` (negative = right turn) on radius `radius`.
  static TrackSegment arc(double radius, double angle_rad);
};

struct TrackSpec {
  std::string id;
  std::vector<TrackSegment> segments;
  double width = 2.0;
  TerrainProfile terrain;

  double length() const;
  void validate() const;
};

struct TrackProjection {
  double s = 0.0;        ///< arclength of the closest centerline point (extrapolated past the ends)
  double lateral = 0.0;  ///< signed offset, positive to the left of the travel direction
};

/// Centerline evaluation and projection for a TrackSpec. Starts at the
/// origin heading along +x.
class TrackGeometry {
 public:
  explicit TrackGeometry(TrackSpec spec, double spacing = 0.02);

  const TrackSpec& spec() const { return spec_; }
  double length() const { return length_; }

  Pose2 pose_at(double s) const;
  double curvature_at(double s) const;

  /// Closest point searched in [s_hint - back, s_hint + ahead]; pass a
  /// negative hint for a global search.
  TrackProjection project(double x, double y, double s_hint = -1.0, double back = 1.0,
                          double ahead = 2.0) const;

  bool inside_corridor(const TrackProjection& p) const {
    return std::abs(p.lateral) <= 0.5 * spec_.width;
  }

  /// Centerline samples, for rendering.
  const std::vector<Pose2>& polyline() const { return samples_; }
  double spacing() const { return spacing_; }

 private:
  TrackSpec spec_;
  double length_;
  double spacing_;
  std::vector<double> seg_start_;
  std::vector<Pose2> seg_pose_;
  std::vector<Pose2> samples_;
};

/// 10 m straight.
TrackSpec track_a();
/// 10 m with two 90 degree right turns of radius 1.5 m.
TrackSpec track_b();
/// Right, left, right turns of radius 1.5 m.
TrackSpec track_c();
/// Long winding course with varied radii and several soft patches, used to
/// generate training data.
TrackSpec track_mixed();

/// "A", "B", "C" or "mixed". Throws ConfigError otherwise.
TrackSpec make_track(const std::string& id);

}  // namespace teleop
