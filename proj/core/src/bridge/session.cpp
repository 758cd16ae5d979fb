#include "teleop/bridge/session.hpp"

#include "teleop/error.hpp"

namespace teleop::bridge {
namespace {

ScenarioConfig interactive(ScenarioConfig c) {
  c.stop_at_finish = false;
  return c;
}

}  // namespace

Session::Session(ScenarioConfig config, ModelSet models, double deadman)
    : sim_(interactive(std::move(config)), std::move(models)), deadman_(deadman) {
  if (!(deadman > 0.0)) throw ConfigError("dead-man timeout must be positive");
  restart(sim_.run_case());
}

void Session::restart(RunCase mode) {
  sim_.reset(mode);
  input_.setZero();
  last_command_.reset();
  last_seq_ = 0;
  omega_sq_.setZero();
  gamma_sq_.setZero();
  sim_.set_manual_reference(Vec2::Zero());
}

void Session::handle(const ClientMessage& msg) {
  if (const auto* m = std::get_if<ModeMsg>(&msg)) {
    restart(m->mode);
    return;
  }
  const auto& c = std::get<CommandMsg>(msg);
  if (last_command_ && c.seq <= last_seq_) return;
  last_seq_ = c.seq;
  last_command_ = sim_.time();
  input_ = {c.v_norm, c.omega_norm};
}

void Session::release() {
  input_.setZero();
  last_command_.reset();
}

StateFrame Session::step() {
  if (sim_.done()) restart(sim_.run_case());
  if (last_command_ && sim_.time() - *last_command_ > deadman_ + 1e-9) release();
  const auto& ugv = sim_.config().ugv;
  sim_.set_manual_reference(Vec2(input_[0] * ugv.v_max, input_[1] * ugv.omega_max));

  const TraceRow& r = sim_.tick();
  omega_sq_ += (r.x_m - r.velocity).cwiseAbs2();
  gamma_sq_ += (r.f_h_est - r.f_e).cwiseAbs2();

  StateFrame f;
  f.seq = ++frame_seq_;
  f.server_time = static_cast<double>(f.seq) * sim_.config().sample_period;
  f.run_time = r.t;
  f.mode = sim_.run_case();
  f.pose = r.pose;
  f.velocity = r.velocity;
  f.x_m = r.x_m;
  f.force_feedback = r.f_in;
  f.f_e = r.f_e;
  f.slip = r.slip;
  f.delay_forward = r.delay_forward;
  f.delay_backward = r.delay_backward;
  f.backlog_forward = r.backlog_forward;
  f.backlog_backward = r.backlog_backward;
  f.omega = omega_sq_.cwiseSqrt();
  f.gamma = gamma_sq_.cwiseSqrt();
  f.progress = r.progress;
  f.lateral = r.lateral;
  f.finished = sim_.completion_time().has_value();
  f.controlled = last_command_.has_value();
  return f;
}

}  // namespace teleop::bridge
