#include "teleop/bridge/protocol.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "teleop/error.hpp"

namespace teleop::bridge {
namespace {

using nlohmann::json;

json vec(const Vec2& v) { return json::array({v[0], v[1]}); }

template <typename T>
T field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(std::string("missing field '") + key + "'");
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ParseError(std::string("field '") + key + "' has the wrong type");
  }
}

double number(const json& j, const char* key) {
  const double v = field<double>(j, key);
  if (!std::isfinite(v)) throw ParseError(std::string("field '") + key + "' is not finite");
  return v;
}

Vec2 read_vec(const json& j, const char* key) {
  const auto a = field<std::vector<double>>(j, key);
  if (a.size() != 2) throw ParseError(std::string("field '") + key + "' must have two entries");
  return {a[0], a[1]};
}

json parse(std::string_view text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ParseError("message is not a JSON object");
  return j;
}

RunCase read_mode(const json& j) {
  try {
    return parse_case(field<std::string>(j, "mode"));
  } catch (const ConfigError& e) {
    throw ParseError(e.what());
  }
}

}  // namespace

ClientMessage decode_client(std::string_view text) {
  const json j = parse(text);
  const auto type = field<std::string>(j, "type");
  if (type == "cmd") {
    CommandMsg m;
    m.seq = field<std::uint64_t>(j, "seq");
    m.client_time = j.contains("client_time") ? number(j, "client_time") : 0.0;
    m.v_norm = std::clamp(number(j, "v"), -1.0, 1.0);
    m.omega_norm = std::clamp(number(j, "omega"), -1.0, 1.0);
    return m;
  }
  if (type == "mode") return ModeMsg{read_mode(j)};
  throw ParseError("unknown message type '" + type + "'");
}

std::string encode_client(const ClientMessage& msg) {
  json j;
  if (const auto* c = std::get_if<CommandMsg>(&msg)) {
    j = {{"type", "cmd"},     {"version", kProtocolVersion}, {"seq", c->seq},
         {"client_time", c->client_time}, {"v", c->v_norm}, {"omega", c->omega_norm}};
  } else {
    j = {{"type", "mode"}, {"version", kProtocolVersion},
         {"mode", case_name(std::get<ModeMsg>(msg).mode)}};
  }
  return j.dump();
}

std::string encode_frame(const StateFrame& f) {
  json j = {{"type", "frame"},
            {"version", kProtocolVersion},
            {"seq", f.seq},
            {"server_time", f.server_time},
            {"run_time", f.run_time},
            {"mode", case_name(f.mode)},
            {"pose", json::array({f.pose.x, f.pose.y, f.pose.heading})},
            {"velocity", vec(f.velocity)},
            {"x_m", vec(f.x_m)},
            {"force_feedback", vec(f.force_feedback)},
            {"f_e", vec(f.f_e)},
            {"slip", json::array({f.slip.right, f.slip.left})},
            {"delay", json::array({f.delay_forward, f.delay_backward})},
            {"backlog", json::array({f.backlog_forward, f.backlog_backward})},
            {"omega", vec(f.omega)},
            {"gamma", vec(f.gamma)},
            {"progress", f.progress},
            {"lateral", f.lateral},
            {"finished", f.finished},
            {"controlled", f.controlled}};
  return j.dump();
}

StateFrame decode_frame(std::string_view text) {
  const json j = parse(text);
  if (field<std::string>(j, "type") != "frame") throw ParseError("not a frame");
  StateFrame f;
  f.seq = field<std::uint64_t>(j, "seq");
  f.server_time = number(j, "server_time");
  f.run_time = number(j, "run_time");
  f.mode = read_mode(j);
  const auto pose = field<std::vector<double>>(j, "pose");
  if (pose.size() != 3) throw ParseError("field 'pose' must have three entries");
  f.pose = {pose[0], pose[1], pose[2]};
  f.velocity = read_vec(j, "velocity");
  f.x_m = read_vec(j, "x_m");
  f.force_feedback = read_vec(j, "force_feedback");
  f.f_e = read_vec(j, "f_e");
  const Vec2 slip = read_vec(j, "slip");
  f.slip = {slip[0], slip[1]};
  const Vec2 delay = read_vec(j, "delay");
  f.delay_forward = delay[0];
  f.delay_backward = delay[1];
  const auto backlog = field<std::vector<std::uint64_t>>(j, "backlog");
  if (backlog.size() != 2) throw ParseError("field 'backlog' must have two entries");
  f.backlog_forward = backlog[0];
  f.backlog_backward = backlog[1];
  f.omega = read_vec(j, "omega");
  f.gamma = read_vec(j, "gamma");
  f.progress = number(j, "progress");
  f.lateral = number(j, "lateral");
  f.finished = field<bool>(j, "finished");
  f.controlled = field<bool>(j, "controlled");
  return f;
}

std::string encode_error(std::string_view message) {
  return json{{"type", "error"}, {"version", kProtocolVersion}, {"message", message}}.dump();
}

}  // namespace teleop::bridge
