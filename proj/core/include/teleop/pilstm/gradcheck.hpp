#pragma once

#include <cstdint>
#include <vector>

#include "teleop/pilstm/network.hpp"
#include "teleop/pilstm/trainer.hpp"

namespace teleop::pilstm {

struct GradCheckOptions {
  Topology topology{3, 4, 2, 1, 2};
  double physics_weight = 0.1;
  double step = 1e-6;
  std::size_t batch = 6;  ///< consecutive windows, so every pair is a collocation point
  std::uint64_t seed = 0;
  double dt = 0.1;
};

struct GradCheckResult {
  std::vector<double> analytic;
  std::vector<double> numeric;  ///< central differences of the total loss
  double max_rel_error = 0.0;
  std::size_t worst = 0;
};

/// |a - b| / max(|a|, |b|), or 0 when both are below 1e-12.
double relative_error(double a, double b);

/// Random parameters and a random scaled batch.
Batch random_batch(const Topology& topology, std::size_t size, std::uint64_t seed);

GradCheckResult gradient_check(const GradCheckOptions& options);

}  // namespace teleop::pilstm
