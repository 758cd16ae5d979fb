#pragma once

#include <array>
#include <cmath>

#include "teleop/dynamics.hpp"

namespace teleop {

struct ControllerGains {
  double k_mv = 5.0;
  double k_momega = 5.0;
  double k_sv = 1.0;
  double k_somega = 1.0;

  /// Throws ConfigError unless every gain is strictly positive.
  void validate() const;
};

/// Force-feedback torque u_m = -(k_mv f_v, k_momega f_omega). `f_in` is either
/// the delayed or the predicted environment force; the law is the same.
Vec2 master_control(const Vec2& f_in, const ControllerGains& gains);

/// Slave command u_s = (k_sv x_v, k_somega x_omega) with |u_sv| <= v_max and,
/// when omega_max is given, |u_somega| <= omega_max.
Vec2 slave_control(const Vec2& x_in, const ControllerGains& gains, double v_max,
                   double omega_max = INFINITY);

/// First-order IIR low-pass  y += a (u - y),  a = dt / (dt + 1 / (2 pi fc)).
class LowPass {
 public:
  explicit LowPass(double cutoff_hz = 0.8);

  double step(double u, double dt);
  void reset(double y0 = 0.0) { y_ = y0; }
  double value() const { return y_; }
  double cutoff_hz() const { return cutoff_hz_; }

  static double coefficient(double cutoff_hz, double dt);

 private:
  double cutoff_hz_;
  double y_ = 0.0;
};

/// Two independent low-pass channels for a coupling pair.
class LowPass2 {
 public:
  explicit LowPass2(double cutoff_hz = 0.8) : ch_{LowPass(cutoff_hz), LowPass(cutoff_hz)} {}

  Vec2 step(const Vec2& u, double dt) { return {ch_[0].step(u[0], dt), ch_[1].step(u[1], dt)}; }
  void reset() {
    ch_[0].reset();
    ch_[1].reset();
  }

 private:
  std::array<LowPass, 2> ch_;
};

}  // namespace teleop
