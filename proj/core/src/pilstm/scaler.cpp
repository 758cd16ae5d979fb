#include "teleop/pilstm/scaler.hpp"

#include <algorithm>

#include "teleop/error.hpp"

namespace teleop::pilstm {

Scaler Scaler::fit(std::span<const Window> windows) {
  if (windows.empty()) throw ConfigError("cannot fit a scaler on no data");
  Scaler s;
  for (int j = 0; j < 4; ++j) {
    s.features[static_cast<std::size_t>(j)] = {windows.front().features(0, j),
                                               windows.front().features(0, j)};
  }
  s.target = {windows.front().target, windows.front().target};
  for (const auto& w : windows) {
    for (int j = 0; j < 4; ++j) {
      auto& mm = s.features[static_cast<std::size_t>(j)];
      mm.min = std::min(mm.min, w.features.col(j).minCoeff());
      mm.max = std::max(mm.max, w.features.col(j).maxCoeff());
    }
    s.target.min = std::min(s.target.min, w.target);
    s.target.max = std::max(s.target.max, w.target);
  }
  return s;
}

}  // namespace teleop::pilstm
