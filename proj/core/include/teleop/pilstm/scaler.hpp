#pragma once

#include <array>
#include <span>

#include "teleop/dataset.hpp"

namespace teleop::pilstm {

/// Per-column min-max map onto [-1, 1]. A flat column gets unit slope so the
/// map stays invertible.
struct MinMax {
  double min = 0.0;
  double max = 1.0;

  double slope() const { return max > min ? 2.0 / (max - min) : 1.0; }
  double scale(double x) const { return (x - min) * slope() - 1.0; }
  double unscale(double y) const { return (y + 1.0) / slope() + min; }

  friend bool operator==(const MinMax&, const MinMax&) = default;
};

struct Scaler {
  std::array<MinMax, 4> features;
  MinMax target;

  /// Statistics over every feature row and target of `windows`.
  /// Throws ConfigError on an empty set.
  static Scaler fit(std::span<const Window> windows);

  /// Scale applied to time derivatives of the target.
  double target_rate_scale() const { return target.slope(); }

  friend bool operator==(const Scaler&, const Scaler&) = default;
};

}  // namespace teleop::pilstm
