#include "teleop/control.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "teleop/error.hpp"

namespace teleop {

void ControllerGains::validate() const {
  if (!(k_mv > 0.0 && k_momega > 0.0 && k_sv > 0.0 && k_somega > 0.0)) {
    throw ConfigError("controller gains must be strictly positive");
  }
}

Vec2 master_control(const Vec2& f_in, const ControllerGains& gains) {
  return {-gains.k_mv * f_in[0], -gains.k_momega * f_in[1]};
}

Vec2 slave_control(const Vec2& x_in, const ControllerGains& gains, double v_max,
                   double omega_max) {
  return {std::clamp(gains.k_sv * x_in[0], -v_max, v_max),
          std::clamp(gains.k_somega * x_in[1], -omega_max, omega_max)};
}

LowPass::LowPass(double cutoff_hz) : cutoff_hz_(cutoff_hz) {
  if (!(cutoff_hz > 0.0)) throw ConfigError("low-pass cutoff must be positive");
}

double LowPass::coefficient(double cutoff_hz, double dt) {
  const double rc = 1.0 / (2.0 * std::numbers::pi * cutoff_hz);
  return dt / (dt + rc);
}

double LowPass::step(double u, double dt) {
  if (!(dt > 0.0)) throw ConfigError("low-pass dt must be positive");
  y_ += coefficient(cutoff_hz_, dt) * (u - y_);
  return y_;
}

}  // namespace teleop
