#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "teleop/coupling.hpp"

namespace teleop {

enum class RunCase { kIdeal, kDelayed, kPredicted };

std::string_view case_name(RunCase c);
RunCase parse_case(std::string_view name);

/// One 10 Hz row of a run.
struct LogRow {
  double t = 0.0;
  std::array<CouplingSample, 4> vars{};  ///< indexed by CouplingVar
  double pose_x = 0.0;
  double pose_y = 0.0;
  double heading = 0.0;
  double s_r = 0.0;
  double s_l = 0.0;
  double u_sv = 0.0;
  double u_somega = 0.0;

  const CouplingSample& operator[](CouplingVar v) const { return vars[index_of(v)]; }
  CouplingSample& operator[](CouplingVar v) { return vars[index_of(v)]; }

  friend bool operator==(const LogRow&, const LogRow&) = default;
};

struct RunLog {
  RunCase run_case = RunCase::kIdeal;
  std::uint64_t seed = 0;
  std::vector<LogRow> rows;

  /// Column of `field` (0..4 in CouplingSample order) for `var`.
  std::vector<double> column(CouplingVar var, int field = 0) const;

  friend bool operator==(const RunLog&, const RunLog&) = default;
};

std::vector<std::string> log_header();

/// CSV with a header line; doubles in shortest round-trip form.
void write_log(const RunLog& log, std::ostream& out);
void write_log(const RunLog& log, const std::filesystem::path& path);

/// Throws ParseError naming the offending line.
RunLog read_log(std::istream& in);
RunLog read_log(const std::filesystem::path& path);

using FeatureMatrix = Eigen::Matrix<double, Eigen::Dynamic, 4, Eigen::RowMajor>;

/// Supervised sample: n rows of features ending one row before the target.
/// `target_features` are the delayed inputs of the target row itself, used
/// only as collocation data by the physics loss.
struct Window {
  FeatureMatrix features;
  double target = 0.0;
  FeatureRow target_features;
  std::size_t target_row = 0;
  std::size_t log_index = 0;
};

/// Stride-1 windows: window i covers rows i..i+n-1, target row i+n.
/// Throws ConfigError if n == 0 or the log is shorter than n.
std::vector<Window> window(const RunLog& log, CouplingVar var, std::size_t n,
                           std::size_t log_index = 0);

/// Windows of several logs concatenated; none crosses a log boundary.
std::vector<Window> window_all(std::span<const RunLog> logs, CouplingVar var, std::size_t n);

/// True when window b directly follows window b-1 in the same log.
bool consecutive(const Window& prev, const Window& next);

struct Split {
  std::vector<Window> train;
  std::vector<Window> validation;
};

/// First floor(ratio * N) windows train, the rest validate.
Split split(std::vector<Window> windows, double ratio = 0.7);

}  // namespace teleop
