#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>

#include "teleop/dataset.hpp"
#include "teleop/dynamics.hpp"

namespace teleop::bridge {

inline constexpr int kProtocolVersion = 1;

/// Drive input from the cockpit. Axes are clamped to [-1, 1] on decode.
struct CommandMsg {
  std::uint64_t seq = 0;
  double client_time = 0.0;
  double v_norm = 0.0;
  double omega_norm = 0.0;

  friend bool operator==(const CommandMsg&, const CommandMsg&) = default;
};

/// Switches between ideal, delayed and predicted; the run restarts.
struct ModeMsg {
  RunCase mode = RunCase::kIdeal;

  friend bool operator==(const ModeMsg&, const ModeMsg&) = default;
};

using ClientMessage = std::variant<CommandMsg, ModeMsg>;

struct StateFrame {
  std::uint64_t seq = 0;
  double server_time = 0.0;  ///< s since the server started, never reset
  double run_time = 0.0;     ///< s since the current run started
  RunCase mode = RunCase::kIdeal;
  Pose2 pose;
  Vec2 velocity = Vec2::Zero();
  Vec2 x_m = Vec2::Zero();
  Vec2 force_feedback = Vec2::Zero();  ///< feedback the master renders
  Vec2 f_e = Vec2::Zero();
  WheelPair slip;
  double delay_forward = 0.0;
  double delay_backward = 0.0;
  std::uint64_t backlog_forward = 0;  ///< packets in flight
  std::uint64_t backlog_backward = 0;
  Vec2 omega = Vec2::Zero();  ///< running tracking errors
  Vec2 gamma = Vec2::Zero();
  double progress = 0.0;
  double lateral = 0.0;
  bool finished = false;
  bool controlled = false;  ///< a client currently holds the controls
};

/// Parses {"type":"cmd",...} or {"type":"mode",...}. Unknown fields are
/// ignored. Throws ParseError.
ClientMessage decode_client(std::string_view text);
std::string encode_client(const ClientMessage& msg);

std::string encode_frame(const StateFrame& frame);
/// Throws ParseError.
StateFrame decode_frame(std::string_view text);

std::string encode_error(std::string_view message);

}  // namespace teleop::bridge
