#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <random>

#include "teleop/dynamics.hpp"

namespace teleop {

struct DelayModel {
  double base_delay = 1.0;         ///< s
  double jitter_half_width = 0.25; ///< s, delay ~ base + U(-j, j)
  double loss_probability = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct DelayedPacket {
  double send_time = 0.0;
  double deliver_time = 0.0;
  std::uint64_t seq = 0;
  Vec2 payload = Vec2::Zero();
};

/// One direction of the emulated network. Packets never overtake each other:
/// a packet whose drawn delivery time precedes its predecessor's is pushed to
/// just after it.
class DelayChannel {
 public:
  static constexpr double kReorderGap = 1e-3;  ///< epsilon between clamped deliveries
  static constexpr double kTimeTolerance = 1e-9;

  explicit DelayChannel(DelayModel model);

  /// Enqueues `payload` stamped at `now`. Returns the packet as scheduled, or
  /// nullopt when it was dropped. Throws ClockError if `now` went backwards.
  std::optional<DelayedPacket> send(const Vec2& payload, double now);

  /// Newest packet with deliver_time <= now; older arrivals are discarded.
  /// When nothing new has arrived the previous packet is returned again, and
  /// before the first delivery a zero packet with seq 0 and send_time -inf.
  const DelayedPacket& receive_latest(double now);

  /// Packet delivered just before the current one (for sender-rate
  /// derivatives), if any.
  const std::optional<DelayedPacket>& previous() const { return previous_; }

  bool has_delivered() const { return delivered_; }
  std::size_t backlog() const { return queue_.size(); }
  const DelayModel& model() const { return model_; }

  /// Drops everything in flight and restores the initial RNG state.
  void reset();

 private:
  DelayModel model_;
  std::mt19937_64 rng_;
  std::deque<DelayedPacket> queue_;
  DelayedPacket current_;
  std::optional<DelayedPacket> previous_;
  bool delivered_ = false;
  double last_send_ = -1e300;
  double last_deliver_ = -1e300;
  std::uint64_t next_seq_ = 1;
};

}  // namespace teleop
