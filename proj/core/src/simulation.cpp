#include "teleop/simulation.hpp"

#include <cmath>

#include "teleop/conv_predictor.hpp"
#include "teleop/error.hpp"
#include "teleop/pilstm/online.hpp"
#include "teleop/rng.hpp"

namespace teleop {
namespace {

TerrainProfile terrain_for(const ScenarioConfig& config) {
  return config.terrain ? *config.terrain : make_track(config.track).terrain;
}

TrackSpec track_for(const ScenarioConfig& config) {
  TrackSpec spec = make_track(config.track);
  spec.terrain = terrain_for(config);
  return spec;
}

OperatorParams manual_params(OperatorParams p) {
  p.k_feel = 0.0;
  p.noise_amp = 0.0;
  return p;
}

}  // namespace

ModelSet load_models(const ScenarioConfig& config) {
  ModelSet models;
  for (CouplingVar v : kAllCouplingVars) {
    const auto& path = config.checkpoints[index_of(v)];
    if (path.empty()) continue;
    auto m = std::make_shared<pilstm::Model>(pilstm::load_checkpoint(path));
    if (m->variable != v) {
      throw ConfigError("checkpoint " + path + " is for " + std::string(var_name(m->variable)) +
                        ", expected " + std::string(var_name(v)));
    }
    models[index_of(v)] = std::move(m);
  }
  return models;
}

RunReport compute_report(const std::vector<TraceRow>& trace, const TrackGeometry& track,
                         std::optional<double> completion, bool left_corridor) {
  (void)track;
  std::vector<Vec2> x_m, vel, f_h, f_e;
  for (const auto& r : trace) {
    x_m.push_back(r.x_m);
    vel.push_back(r.velocity);
    f_h.push_back(r.f_h_est);
    f_e.push_back(r.f_e);
  }
  RunReport rep;
  rep.omega_gamma = omega_gamma(x_m, vel, f_h, f_e);
  rep.completion_time = completion;
  rep.left_corridor = left_corridor;
  rep.duration = trace.empty() ? 0.0 : trace.back().t;
  return rep;
}

TeleopSimulation::TeleopSimulation(ScenarioConfig config, ModelSet models)
    : config_(std::move(config)),
      models_(std::move(models)),
      track_(track_for(config_)),
      terrain_(terrain_for(config_)),
      lpf_x_(config_.filter_cutoff),
      lpf_f_(config_.filter_cutoff) {
  config_.validate();
  substeps_ = static_cast<std::size_t>(std::lround(config_.sample_period / config_.inner_dt));
  reset(config_.run_case);
}

std::unique_ptr<Predictor> TeleopSimulation::make_predictor(CouplingVar var) const {
  if (run_case_ == RunCase::kPredicted && config_.predictor == PredictorKind::kPilstm) {
    const auto& model = models_[index_of(var)];
    if (!model) {
      throw ConfigError("no trained model loaded for " + std::string(var_name(var)));
    }
    return std::make_unique<pilstm::PilstmPredictor>(model, config_.sample_period,
                                                     kMaxPredictorDelay);
  }
  ConvPredictorParams p = conv_params_for(var);
  p.dt = config_.sample_period;
  p.max_delay = kMaxPredictorDelay;
  return std::make_unique<ConvPredictor>(p);
}

void TeleopSimulation::reset(RunCase run_case) {
  run_case_ = run_case;
  master_ = {};
  ugv_ = {};
  lpf_x_.reset();
  lpf_f_.reset();
  for (auto [link, fwd] : {std::pair{&forward_, true}, std::pair{&backward_, false}}) {
    link->channel = std::make_unique<DelayChannel>(channel_model(config_, fwd));
    const CouplingVar a = fwd ? CouplingVar::kXmv : CouplingVar::kFev;
    const CouplingVar b = fwd ? CouplingVar::kXmomega : CouplingVar::kFeomega;
    link->predictors = {make_predictor(a), make_predictor(b)};
    link->ideal_diff = {BackwardDifference(config_.sample_period),
                        BackwardDifference(config_.sample_period)};
  }
  operator_ = std::make_unique<ScriptedOperator>(config_.operator_params, config_.seed,
                                                 config_.inner_dt, config_.sample_period);
  manual_operator_ = std::make_unique<ScriptedOperator>(
      manual_params(config_.operator_params), config_.seed, config_.inner_dt,
      config_.sample_period);
  terrain_rng_ = make_rng(config_.seed, RngStream::kTerrain);
  slip_estimate_ = {};
  progress_ = 0.0;
  k_ = 0;
  done_ = false;
  left_corridor_ = false;
  completion_.reset();
  log_ = RunLog{run_case, config_.seed, {}};
  trace_.clear();
  fine_.clear();
}

LinkStep pass_link(DelayChannel& channel, const std::array<Predictor*, 2>& predictors,
                   const Vec2& sent, double t) {
  channel.send(sent, t);
  const DelayedPacket& pkt = channel.receive_latest(t);
  Vec2 xdot = Vec2::Zero();
  const auto& prev = channel.previous();
  if (channel.has_delivered() && prev) {
    xdot = (pkt.payload - prev->payload) / (pkt.send_time - prev->send_time);
  }
  LinkStep out;
  out.delayed = pkt.payload;
  out.delay = channel.has_delivered() ? t - pkt.send_time : channel.model().base_delay;
  for (std::size_t i = 0; i < 2; ++i) {
    out.predicted[static_cast<Eigen::Index>(i)] =
        predictors[i]->step(pkt.payload[static_cast<Eigen::Index>(i)],
                            xdot[static_cast<Eigen::Index>(i)],
                            std::min(out.delay, kMaxPredictorDelay));
    out.features[i] = predictors[i]->last_features();
  }
  return out;
}

Vec2 TeleopSimulation::exchange(Link& link, const Vec2& sent, double t, CouplingSample& a,
                                CouplingSample& b, double& delay_out) {
  CouplingSample* samples[2] = {&a, &b};
  if (run_case_ == RunCase::kIdeal) {
    for (int i = 0; i < 2; ++i) {
      const double xd = link.ideal_diff[static_cast<std::size_t>(i)].step(sent[i]);
      *samples[i] = {sent[i], sent[i], sent[i], xd, xd};
    }
    delay_out = 0.0;
    return sent;
  }

  const LinkStep s = pass_link(*link.channel,
                               {link.predictors[0].get(), link.predictors[1].get()}, sent, t);
  delay_out = s.delay;
  for (std::size_t i = 0; i < 2; ++i) {
    const FeatureRow& f = s.features[i];
    *samples[i] = {sent[static_cast<Eigen::Index>(i)], f.x_delayed, f.x_p_delayed,
                   f.xdot_delayed, f.xdot_p_delayed};
  }
  return run_case_ == RunCase::kPredicted ? s.predicted : s.delayed;
}

const TraceRow& TeleopSimulation::tick() {
  if (done_) throw Error("simulation already finished");
  const double ts = config_.sample_period;
  const double dt = config_.inner_dt;
  const double t = time();

  auto slip_noise = [&]() {
    const double h = config_.slip.noise;
    return WheelPair{uniform(terrain_rng_, -h, h), uniform(terrain_rng_, -h, h)};
  };

  TraceRow row;
  LogRow lr;
  row.t = lr.t = t;

  if (run_case_ != RunCase::kIdeal) {
    row.backlog_forward = forward_.channel->backlog();
    row.backlog_backward = backward_.channel->backlog();
  }
  row.x_m = master_.x;
  row.x_sent = lpf_x_.step(master_.x, ts);
  row.x_in = exchange(forward_, row.x_sent, t, lr[CouplingVar::kXmv], lr[CouplingVar::kXmomega],
                      row.delay_forward);
  row.u_s = slave_control(row.x_in, config_.gains, config_.ugv.v_max, config_.ugv.omega_max);
  ugv_ = update_wheels(config_.ugv, ugv_, row.u_s, terrain_, slip_estimate_, slip_noise());
  row.velocity = {ugv_.v_s, ugv_.omega_s};
  row.f_e = environment_force(ugv_, row.u_s);
  row.f_sent = lpf_f_.step(row.f_e, ts);
  row.f_in = exchange(backward_, row.f_sent, t, lr[CouplingVar::kFev], lr[CouplingVar::kFeomega],
                      row.delay_backward);
  row.u_m = master_control(row.f_in, config_.gains);

  row.pose = ugv_.pose;
  row.slip = ugv_.slip;
  row.slip_estimate = slip_estimate_;
  const TrackProjection proj = track_.project(ugv_.pose.x, ugv_.pose.y, k_ == 0 ? -1.0 : progress_);
  progress_ = std::max(0.0, proj.s);
  row.progress = proj.s;
  row.lateral = proj.lateral;

  lr.pose_x = ugv_.pose.x;
  lr.pose_y = ugv_.pose.y;
  lr.heading = ugv_.pose.heading;
  lr.s_r = ugv_.slip.right;
  lr.s_l = ugv_.slip.left;
  lr.u_sv = row.u_s[0];
  lr.u_somega = row.u_s[1];
  log_.rows.push_back(lr);

  const bool inside = track_.inside_corridor(proj);
  if (!inside && !left_corridor_ && !completion_) {
    left_corridor_ = true;
    if (config_.stop_at_finish) done_ = true;
  }
  if (inside && !left_corridor_ && !completion_ && proj.s >= track_.length()) {
    completion_ = t;
    if (config_.stop_at_finish) done_ = true;
  }

  if (!done_) {
    const double speed = operator_->perceive(master_.x, row.velocity, ts);
    const Vec2 x_ref = manual_ref_ ? *manual_ref_
                                   : pursuit_reference(track_, ugv_.pose, proj.s,
                                                       config_.operator_params.lookahead, speed);
    ScriptedOperator& op = manual_ref_ ? *manual_operator_ : *operator_;
    const Vec2 m_bar = config_.device.equivalent_mass();
    const Vec2 c_bar = config_.device.equivalent_damping();
    Vec2 x_prev = master_.x;
    for (std::size_t j = 0; j < substeps_; ++j) {
      if (j > 0) {
        ugv_ = update_wheels(config_.ugv, ugv_, row.u_s, terrain_, slip_estimate_, slip_noise());
      }
      const Vec2 f_h = op.step(t + static_cast<double>(j) * dt, x_ref, master_.x, row.u_m);
      fine_.push_back({master_.x, row.u_m, f_h});
      if (j + 1 == substeps_) {
        row.f_h = f_h;
        row.f_h_est = m_bar.cwiseProduct((master_.x - x_prev) / dt) +
                      c_bar.cwiseProduct(master_.x) - row.u_m;
      }
      x_prev = master_.x;
      master_ = step_master(config_.device, master_, row.u_m, f_h, dt);

      const double a = dt / config_.slip.ffc_tau;
      slip_estimate_.right += a * (config_.slip.ffc_gain * ugv_.slip.right - slip_estimate_.right);
      slip_estimate_.left += a * (config_.slip.ffc_gain * ugv_.slip.left - slip_estimate_.left);
      ugv_ = advance_pose(ugv_, dt);
    }
  }

  ++k_;
  if (time() >= config_.duration - 1e-9) done_ = true;
  trace_.push_back(row);
  return trace_.back();
}

RunResult TeleopSimulation::run() {
  while (!done_) tick();
  RunResult r;
  r.log = log_;
  r.trace = trace_;
  r.fine = fine_;
  r.report = compute_report(trace_, track_, completion_, left_corridor_);
  return r;
}

RunResult run_case(const ScenarioConfig& config, const ModelSet& models) {
  TeleopSimulation sim(config, models);
  return sim.run();
}

}  // namespace teleop
