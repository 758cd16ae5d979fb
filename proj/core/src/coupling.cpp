#include "teleop/coupling.hpp"

#include "teleop/error.hpp"

namespace teleop {

std::string_view var_name(CouplingVar var) {
  switch (var) {
    case CouplingVar::kXmv: return "x_mv";
    case CouplingVar::kXmomega: return "x_momega";
    case CouplingVar::kFev: return "f_ev";
    case CouplingVar::kFeomega: return "f_eomega";
  }
  return "?";
}

CouplingVar parse_var(std::string_view name) {
  for (CouplingVar v : kAllCouplingVars) {
    if (var_name(v) == name) return v;
  }
  throw ConfigError("unknown coupling variable '" + std::string(name) + "'");
}

ConvPredictorParams conv_params_for(CouplingVar var) {
  return is_forward(var) ? ConvPredictorParams::forward() : ConvPredictorParams::backward();
}

std::array<std::string, 5> column_names(CouplingVar var) {
  const std::string name(var_name(var));
  const auto us = name.find('_');
  const std::string prefix = name.substr(0, us);
  const std::string suffix = name.substr(us + 1);
  const std::string dot = prefix + "dot_" + suffix;
  return {name, name + "_del", name + "_p_del", dot + "_del", dot + "_p_del"};
}

}  // namespace teleop
