#pragma once

#include <cstddef>
#include <deque>
#include <span>
#include <vector>

namespace teleop {

/// Per-tick predictor input features, in network feature order:
/// x(t-T), x_p(t-T), x_dot(t-T), x_p_dot(t-T).
struct FeatureRow {
  double x_delayed = 0.0;
  double x_p_delayed = 0.0;
  double xdot_delayed = 0.0;
  double xdot_p_delayed = 0.0;
};

/// Sample-rate backward difference; the first sample yields 0.
class BackwardDifference {
 public:
  explicit BackwardDifference(double dt) : dt_(dt) {}
  double step(double x);
  void reset() { primed_ = false; }

 private:
  double dt_;
  double prev_ = 0.0;
  bool primed_ = false;
};

std::vector<double> estimate_derivative(std::span<const double> samples, double dt);

/// Ring of past predictions (x_p, x_p_dot) on the sample grid.
class PredictionHistory {
 public:
  explicit PredictionHistory(std::size_t capacity);

  void push(double x_p, double xdot_p);
  void clear() { entries_.clear(); }

  std::size_t size() const { return entries_.size(); }
  std::size_t capacity() const { return capacity_; }

  /// True when the entry pushed `lag` pushes ago is still stored.
  bool has_lag(std::size_t lag) const { return lag >= 1 && lag <= entries_.size(); }

  /// Entry pushed `lag` pushes ago (lag = 1 is the most recent).
  double x_at_lag(std::size_t lag) const { return entries_[entries_.size() - lag].x; }
  double xdot_at_lag(std::size_t lag) const { return entries_[entries_.size() - lag].xdot; }

  double last_x() const { return entries_.back().x; }
  bool empty() const { return entries_.empty(); }

 private:
  struct Entry {
    double x;
    double xdot;
  };
  std::size_t capacity_;
  std::deque<Entry> entries_;
};

/// Common interface of the per-variable delay compensators. step() is called
/// once per sample tick with the delayed sample held at the receiver and its
/// age, and returns the estimate of the undelayed value at this tick.
class Predictor {
 public:
  virtual ~Predictor() = default;

  virtual double step(double x_delayed, double xdot_delayed, double delay) = 0;
  virtual void reset() = 0;

  /// Features seen by the most recent step().
  const FeatureRow& last_features() const { return features_; }

 protected:
  FeatureRow features_;
};

/// Sample lag for a measured delay: nearest grid point, at least one sample.
std::size_t delay_to_lag(double delay, double dt);

}  // namespace teleop
