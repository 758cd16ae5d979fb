#include "teleop/channel.hpp"

#include <cmath>
#include <limits>

#include "teleop/error.hpp"
#include "teleop/rng.hpp"

namespace teleop {

void DelayModel::validate() const {
  if (!(base_delay >= 0.0)) throw ConfigError("base delay must be non-negative");
  if (!(jitter_half_width >= 0.0 && jitter_half_width <= base_delay)) {
    throw ConfigError("jitter half-width must lie in [0, base delay]");
  }
  if (!(loss_probability >= 0.0 && loss_probability < 1.0)) {
    throw ConfigError("loss probability must lie in [0, 1)");
  }
}

DelayChannel::DelayChannel(DelayModel model) : model_(model) {
  model_.validate();
  reset();
}

void DelayChannel::reset() {
  rng_.seed(model_.seed);
  queue_.clear();
  current_ = DelayedPacket{};
  current_.send_time = -std::numeric_limits<double>::infinity();
  current_.deliver_time = -std::numeric_limits<double>::infinity();
  previous_.reset();
  delivered_ = false;
  last_send_ = -1e300;
  last_deliver_ = -1e300;
  next_seq_ = 1;
}

std::optional<DelayedPacket> DelayChannel::send(const Vec2& payload, double now) {
  if (!std::isfinite(now)) throw ClockError("channel send time is not finite");
  if (now < last_send_) throw ClockError("channel send time went backwards");
  last_send_ = now;

  // Both draws happen for every packet so the schedule depends only on the
  // seed and the send count.
  const double jitter = uniform(rng_, -model_.jitter_half_width, model_.jitter_half_width);
  const double loss_draw = uniform(rng_, 0.0, 1.0);
  const std::uint64_t seq = next_seq_++;
  if (loss_draw < model_.loss_probability) return std::nullopt;

  DelayedPacket p;
  p.send_time = now;
  p.deliver_time = std::max(now + model_.base_delay + jitter, last_deliver_ + kReorderGap);
  p.seq = seq;
  p.payload = payload;
  last_deliver_ = p.deliver_time;
  queue_.push_back(p);
  return p;
}

const DelayedPacket& DelayChannel::receive_latest(double now) {
  while (!queue_.empty() && queue_.front().deliver_time <= now + kTimeTolerance) {
    if (delivered_) previous_ = current_;
    current_ = queue_.front();
    delivered_ = true;
    queue_.pop_front();
  }
  return current_;
}

}  // namespace teleop
