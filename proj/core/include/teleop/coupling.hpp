#pragma once

#include <array>
#include <string>
#include <string_view>

#include "teleop/conv_predictor.hpp"

namespace teleop {

/// The four signals crossing the channel.
enum class CouplingVar : int { kXmv = 0, kXmomega = 1, kFev = 2, kFeomega = 3 };

inline constexpr std::array<CouplingVar, 4> kAllCouplingVars{
    CouplingVar::kXmv, CouplingVar::kXmomega, CouplingVar::kFev, CouplingVar::kFeomega};

std::string_view var_name(CouplingVar var);

/// Inverse of var_name. Throws ConfigError on unknown names.
CouplingVar parse_var(std::string_view name);

/// Motion commands travel master to slave, forces the other way.
inline bool is_forward(CouplingVar var) { return static_cast<int>(var) < 2; }

/// 0 for the linear axis, 1 for the angular one.
inline int axis_of(CouplingVar var) { return static_cast<int>(var) % 2; }

inline std::size_t index_of(CouplingVar var) { return static_cast<std::size_t>(var); }

/// Conventional-predictor gains for the channel direction carrying `var`.
ConvPredictorParams conv_params_for(CouplingVar var);

/// One 10 Hz record of a coupling variable.
struct CouplingSample {
  double x_actual = 0.0;
  double x_delayed = 0.0;
  double x_p_delayed = 0.0;
  double xdot_delayed = 0.0;
  double xdot_p_delayed = 0.0;

  FeatureRow features() const { return {x_delayed, x_p_delayed, xdot_delayed, xdot_p_delayed}; }

  friend bool operator==(const CouplingSample&, const CouplingSample&) = default;
};

/// CSV column names for the five fields of `var`, e.g. x_mv, x_mv_del,
/// x_mv_p_del, xdot_mv_del, xdot_mv_p_del.
std::array<std::string, 5> column_names(CouplingVar var);

}  // namespace teleop
