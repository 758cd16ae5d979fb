#include "teleop/scenario.hpp"

#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "teleop/error.hpp"
#include "teleop/rng.hpp"
#include "teleop/track.hpp"

namespace teleop {
namespace {

using nlohmann::json;

void reject_unknown(const json& j, std::initializer_list<const char*> allowed, const char* where) {
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : j.items()) {
    if (!ok.count(key)) throw ConfigError(std::string("unknown key '") + key + "' in " + where);
  }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void read_vec2(const json& j, const char* key, Vec2& out) {
  if (!j.contains(key)) return;
  const json& v = j.at(key);
  if (v.is_number()) {
    out = Vec2::Constant(v.get<double>());
  } else {
    const auto a = v.get<std::vector<double>>();
    if (a.size() != 2) throw ConfigError(std::string(key) + " must have two entries");
    out = {a[0], a[1]};
  }
}

json vec2_json(const Vec2& v) { return json::array({v[0], v[1]}); }

}  // namespace

std::string_view predictor_name(PredictorKind k) {
  return k == PredictorKind::kConv ? "conv" : "pilstm";
}

PredictorKind parse_predictor(std::string_view name) {
  if (name == "conv") return PredictorKind::kConv;
  if (name == "pilstm") return PredictorKind::kPilstm;
  throw ConfigError("unknown predictor '" + std::string(name) + "'");
}

void SlipOptions::validate() const {
  if (!(noise >= 0.0)) throw ConfigError("slip noise must be non-negative");
  if (!(ffc_gain >= 0.0)) throw ConfigError("ffc_gain must be non-negative");
  if (!(ffc_tau > 0.0)) throw ConfigError("ffc_tau must be positive");
}

void ScenarioConfig::validate() const {
  make_track(track);
  if (terrain) terrain->validate();
  delay.validate();
  gains.validate();
  device.validate();
  ugv.validate();
  operator_params.validate();
  slip.validate();
  if (!(filter_cutoff > 0.0 && filter_cutoff < 0.5 / sample_period)) {
    throw ConfigError("filter cutoff must lie below the Nyquist frequency");
  }
  if (!(duration > 0.0)) throw ConfigError("duration must be positive");
  if (!(sample_period > 0.0 && inner_dt > 0.0)) throw ConfigError("time steps must be positive");
  const double ratio = sample_period / inner_dt;
  if (std::abs(ratio - std::round(ratio)) > 1e-9) {
    throw ConfigError("sample period must be a multiple of the inner step");
  }
  for (const auto& p : checkpoints) {
    if (!p.empty() && !std::filesystem::exists(p)) throw ConfigError("checkpoint not found: " + p);
  }
}

OperatorParams persona_params(const std::string& name) {
  for (const auto& p : default_personas()) {
    if (p.name == name) return p.params;
  }
  throw ConfigError("unknown persona '" + name + "'");
}

ScenarioConfig parse_scenario(const std::string& text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("scenario is not valid JSON: ") + e.what());
  }
  ScenarioConfig c;
  try {
    reject_unknown(j,
                   {"schema_version", "name", "track", "terrain", "delay", "case", "predictor",
                    "checkpoints", "gains", "device", "ugv", "filter_cutoff", "operator", "slip",
                    "duration", "stop_at_finish", "sample_period", "inner_dt", "seed",
                    "output_dir"},
                   "scenario");
    const int version = j.value("schema_version", kScenarioSchemaVersion);
    if (version != kScenarioSchemaVersion) {
      throw ConfigError("unsupported scenario schema_version " + std::to_string(version));
    }
    read(j, "name", c.name);
    read(j, "track", c.track);
    if (j.contains("terrain")) {
      const json& t = j.at("terrain");
      reject_unknown(t, {"z", "phi", "phi_min", "phi_max", "s_max"}, "terrain");
      TerrainProfile p;
      read(t, "z", p.z);
      read(t, "phi", p.phi);
      read(t, "phi_min", p.phi_min);
      read(t, "phi_max", p.phi_max);
      read(t, "s_max", p.s_max);
      c.terrain = p;
    }
    if (j.contains("delay")) {
      const json& d = j.at("delay");
      reject_unknown(d, {"base", "jitter", "loss"}, "delay");
      read(d, "base", c.delay.base_delay);
      read(d, "jitter", c.delay.jitter_half_width);
      read(d, "loss", c.delay.loss_probability);
    }
    if (j.contains("case")) c.run_case = parse_case(j.at("case").get<std::string>());
    if (j.contains("predictor")) c.predictor = parse_predictor(j.at("predictor").get<std::string>());
    if (j.contains("checkpoints")) {
      for (const auto& [key, value] : j.at("checkpoints").items()) {
        std::filesystem::path p = value.get<std::string>();
        if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
        c.checkpoints[index_of(parse_var(key))] = p.string();
      }
    }
    if (j.contains("gains")) {
      const json& g = j.at("gains");
      reject_unknown(g, {"k_mv", "k_momega", "k_sv", "k_somega", "k_m", "k_s"}, "gains");
      if (g.contains("k_m")) c.gains.k_mv = c.gains.k_momega = g.at("k_m").get<double>();
      if (g.contains("k_s")) c.gains.k_sv = c.gains.k_somega = g.at("k_s").get<double>();
      read(g, "k_mv", c.gains.k_mv);
      read(g, "k_momega", c.gains.k_momega);
      read(g, "k_sv", c.gains.k_sv);
      read(g, "k_somega", c.gains.k_somega);
    }
    if (j.contains("device")) {
      const json& d = j.at("device");
      reject_unknown(d, {"mass", "damping", "lambda_blend", "b_vi", "b_p"}, "device");
      read_vec2(d, "mass", c.device.mass);
      read_vec2(d, "damping", c.device.damping);
      read(d, "lambda_blend", c.device.lambda_blend);
      read_vec2(d, "b_vi", c.device.b_vi);
      read_vec2(d, "b_p", c.device.b_p);
    }
    if (j.contains("ugv")) {
      const json& u = j.at("ugv");
      reject_unknown(u, {"half_track", "wheel_radius", "v_max", "omega_max"}, "ugv");
      read(u, "half_track", c.ugv.half_track);
      read(u, "wheel_radius", c.ugv.wheel_radius);
      read(u, "v_max", c.ugv.v_max);
      read(u, "omega_max", c.ugv.omega_max);
    }
    read(j, "filter_cutoff", c.filter_cutoff);
    c.operator_params = persona_params(c.persona);
    if (j.contains("operator")) {
      const json& o = j.at("operator");
      reject_unknown(o,
                     {"persona", "k_track", "k_feel", "reaction_delay", "noise_amp", "lookahead",
                      "target_speed", "caution", "caution_tau", "pause_above", "resume_below", "settle_time", "force_limit", "seed"},
                     "operator");
      if (o.contains("persona")) {
        c.persona = o.at("persona").get<std::string>();
        c.operator_params = persona_params(c.persona);
      }
      auto& p = c.operator_params;
      read(o, "k_track", p.k_track);
      read(o, "k_feel", p.k_feel);
      read(o, "reaction_delay", p.reaction_delay);
      read(o, "noise_amp", p.noise_amp);
      read(o, "lookahead", p.lookahead);
      read(o, "target_speed", p.target_speed);
      read(o, "caution", p.caution);
      read(o, "caution_tau", p.caution_tau);
      read(o, "pause_above", p.pause_above);
      read(o, "resume_below", p.resume_below);
      read(o, "settle_time", p.settle_time);
      read(o, "force_limit", p.force_limit);
      read(o, "seed", p.seed);
    }
    if (j.contains("slip")) {
      const json& s = j.at("slip");
      reject_unknown(s, {"noise", "ffc_gain", "ffc_tau"}, "slip");
      read(s, "noise", c.slip.noise);
      read(s, "ffc_gain", c.slip.ffc_gain);
      read(s, "ffc_tau", c.slip.ffc_tau);
    }
    read(j, "duration", c.duration);
    read(j, "stop_at_finish", c.stop_at_finish);
    read(j, "sample_period", c.sample_period);
    read(j, "inner_dt", c.inner_dt);
    read(j, "seed", c.seed);
    read(j, "output_dir", c.output_dir);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid scenario: ") + e.what());
  }
  c.validate();
  return c;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open scenario " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), path.parent_path());
}

std::string scenario_to_json(const ScenarioConfig& c) {
  json j;
  j["schema_version"] = kScenarioSchemaVersion;
  j["name"] = c.name;
  j["track"] = c.track;
  if (c.terrain) {
    j["terrain"] = {{"z", c.terrain->z},
                    {"phi", c.terrain->phi},
                    {"phi_min", c.terrain->phi_min},
                    {"phi_max", c.terrain->phi_max},
                    {"s_max", c.terrain->s_max}};
  }
  j["delay"] = {{"base", c.delay.base_delay},
                {"jitter", c.delay.jitter_half_width},
                {"loss", c.delay.loss_probability}};
  j["case"] = std::string(case_name(c.run_case));
  j["predictor"] = std::string(predictor_name(c.predictor));
  json cps = json::object();
  for (CouplingVar v : kAllCouplingVars) {
    if (!c.checkpoints[index_of(v)].empty()) cps[std::string(var_name(v))] = c.checkpoints[index_of(v)];
  }
  j["checkpoints"] = cps;
  j["gains"] = {{"k_mv", c.gains.k_mv},
                {"k_momega", c.gains.k_momega},
                {"k_sv", c.gains.k_sv},
                {"k_somega", c.gains.k_somega}};
  j["device"] = {{"mass", vec2_json(c.device.mass)},
                 {"damping", vec2_json(c.device.damping)},
                 {"lambda_blend", c.device.lambda_blend},
                 {"b_vi", vec2_json(c.device.b_vi)},
                 {"b_p", vec2_json(c.device.b_p)}};
  j["ugv"] = {{"half_track", c.ugv.half_track},
              {"wheel_radius", c.ugv.wheel_radius},
              {"v_max", c.ugv.v_max},
              {"omega_max", c.ugv.omega_max}};
  j["filter_cutoff"] = c.filter_cutoff;
  const auto& p = c.operator_params;
  j["operator"] = {{"persona", c.persona},          {"k_track", p.k_track},
                   {"k_feel", p.k_feel},            {"reaction_delay", p.reaction_delay},
                   {"noise_amp", p.noise_amp},      {"lookahead", p.lookahead},
                   {"target_speed", p.target_speed}, {"caution", p.caution}, {"caution_tau", p.caution_tau},
                   {"pause_above", p.pause_above}, {"resume_below", p.resume_below},
                   {"settle_time", p.settle_time},
                   {"force_limit", p.force_limit},  {"seed", p.seed}};
  j["slip"] = {{"noise", c.slip.noise}, {"ffc_gain", c.slip.ffc_gain}, {"ffc_tau", c.slip.ffc_tau}};
  j["duration"] = c.duration;
  j["stop_at_finish"] = c.stop_at_finish;
  j["sample_period"] = c.sample_period;
  j["inner_dt"] = c.inner_dt;
  j["seed"] = c.seed;
  j["output_dir"] = c.output_dir;
  return j.dump(2);
}

DelayModel channel_model(const ScenarioConfig& config, bool forward) {
  DelayModel m = config.delay;
  auto rng = make_rng(config.seed, forward ? RngStream::kForwardChannel : RngStream::kBackwardChannel);
  m.seed = rng();
  return m;
}

}  // namespace teleop
