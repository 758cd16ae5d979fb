#include "teleop/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "teleop/error.hpp"

namespace teleop {
namespace {

constexpr std::size_t kCouplingColumns = 5 * 4;
constexpr std::size_t kColumns = 1 + kCouplingColumns + 7 + 2;

void put_double(std::string& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

double get_double(std::string_view s, std::size_t line) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ParseError("bad number '" + std::string(s) + "'", line);
  }
  return v;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

double& field_ref(CouplingSample& s, int field) {
  switch (field) {
    case 0: return s.x_actual;
    case 1: return s.x_delayed;
    case 2: return s.x_p_delayed;
    case 3: return s.xdot_delayed;
    default: return s.xdot_p_delayed;
  }
}

double field_of(const CouplingSample& s, int field) {
  return field_ref(const_cast<CouplingSample&>(s), field);
}

}  // namespace

std::string_view case_name(RunCase c) {
  switch (c) {
    case RunCase::kIdeal: return "ideal";
    case RunCase::kDelayed: return "delayed";
    case RunCase::kPredicted: return "predicted";
  }
  return "?";
}

RunCase parse_case(std::string_view name) {
  if (name == "ideal") return RunCase::kIdeal;
  if (name == "delayed") return RunCase::kDelayed;
  if (name == "predicted") return RunCase::kPredicted;
  throw ConfigError("unknown case '" + std::string(name) + "'");
}

std::vector<double> RunLog::column(CouplingVar var, int field) const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(field_of(r[var], field));
  return out;
}

std::vector<std::string> log_header() {
  std::vector<std::string> h{"t"};
  for (CouplingVar v : kAllCouplingVars) {
    for (auto& name : column_names(v)) h.push_back(name);
  }
  for (const char* name :
       {"pose_x", "pose_y", "heading", "s_r", "s_l", "u_sv", "u_somega", "case", "seed"}) {
    h.emplace_back(name);
  }
  return h;
}

void write_log(const RunLog& log, std::ostream& out) {
  std::string buf;
  const auto header = log_header();
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) buf += ',';
    buf += header[i];
  }
  buf += '\n';
  const std::string tail =
      std::string(case_name(log.run_case)) + "," + std::to_string(log.seed) + "\n";
  for (const auto& r : log.rows) {
    put_double(buf, r.t);
    for (const auto& s : r.vars) {
      for (int f = 0; f < 5; ++f) {
        buf += ',';
        put_double(buf, field_of(s, f));
      }
    }
    for (double v : {r.pose_x, r.pose_y, r.heading, r.s_r, r.s_l, r.u_sv, r.u_somega}) {
      buf += ',';
      put_double(buf, v);
    }
    buf += ',';
    buf += tail;
  }
  out << buf;
  if (!out) throw Error("failed writing run log");
}

void write_log(const RunLog& log, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  write_log(log, out);
}

RunLog read_log(std::istream& in) {
  RunLog log;
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw ParseError("missing header", line_no);
  {
    const auto cols = split_csv(line);
    const auto header = log_header();
    if (cols.size() != header.size()) throw ParseError("header has wrong column count", line_no);
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (cols[i] != header[i]) {
        throw ParseError("unexpected header column '" + std::string(cols[i]) + "'", line_no);
      }
    }
  }

  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cols = split_csv(line);
    if (cols.size() != kColumns) {
      throw ParseError("row has " + std::to_string(cols.size()) + " columns, expected " +
                           std::to_string(kColumns),
                       line_no);
    }
    LogRow r;
    std::size_t c = 0;
    r.t = get_double(cols[c++], line_no);
    for (auto& s : r.vars) {
      for (int f = 0; f < 5; ++f) field_ref(s, f) = get_double(cols[c++], line_no);
    }
    for (double* v : {&r.pose_x, &r.pose_y, &r.heading, &r.s_r, &r.s_l, &r.u_sv, &r.u_somega}) {
      *v = get_double(cols[c++], line_no);
    }
    RunCase rc;
    try {
      rc = parse_case(cols[c++]);
    } catch (const ConfigError& e) {
      throw ParseError(e.what(), line_no);
    }
    std::uint64_t seed = 0;
    const auto sv = cols[c];
    const auto res = std::from_chars(sv.data(), sv.data() + sv.size(), seed);
    if (res.ec != std::errc() || res.ptr != sv.data() + sv.size()) {
      throw ParseError("bad seed '" + std::string(sv) + "'", line_no);
    }
    if (first) {
      log.run_case = rc;
      log.seed = seed;
      first = false;
    } else if (rc != log.run_case || seed != log.seed) {
      throw ParseError("case/seed differ from the first row", line_no);
    }
    if (!log.rows.empty() && !(r.t > log.rows.back().t)) {
      throw ParseError("time column not strictly increasing", line_no);
    }
    log.rows.push_back(r);
  }
  return log;
}

RunLog read_log(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return read_log(in);
}

std::vector<Window> window(const RunLog& log, CouplingVar var, std::size_t n,
                           std::size_t log_index) {
  if (n == 0) throw ConfigError("window length must be positive");
  const std::size_t rows = log.rows.size();
  if (rows < n) {
    throw ConfigError("log has " + std::to_string(rows) + " rows, shorter than window " +
                      std::to_string(n));
  }
  std::vector<Window> out;
  out.reserve(rows - n);
  for (std::size_t i = 0; i + n < rows; ++i) {
    Window w;
    w.features.resize(static_cast<Eigen::Index>(n), 4);
    for (std::size_t j = 0; j < n; ++j) {
      const FeatureRow f = log.rows[i + j][var].features();
      w.features.row(static_cast<Eigen::Index>(j)) << f.x_delayed, f.x_p_delayed, f.xdot_delayed,
          f.xdot_p_delayed;
    }
    const auto& target = log.rows[i + n][var];
    w.target = target.x_actual;
    w.target_features = target.features();
    w.target_row = i + n;
    w.log_index = log_index;
    out.push_back(std::move(w));
  }
  return out;
}

std::vector<Window> window_all(std::span<const RunLog> logs, CouplingVar var, std::size_t n) {
  std::vector<Window> out;
  for (std::size_t k = 0; k < logs.size(); ++k) {
    auto w = window(logs[k], var, n, k);
    out.insert(out.end(), std::make_move_iterator(w.begin()), std::make_move_iterator(w.end()));
  }
  return out;
}

bool consecutive(const Window& prev, const Window& next) {
  return prev.log_index == next.log_index && next.target_row == prev.target_row + 1;
}

Split split(std::vector<Window> windows, double ratio) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw ConfigError("split ratio must lie in (0, 1)");
  const auto n_train =
      static_cast<std::size_t>(std::floor(ratio * static_cast<double>(windows.size()) + 1e-9));
  Split s;
  s.train.assign(std::make_move_iterator(windows.begin()),
                 std::make_move_iterator(windows.begin() + static_cast<std::ptrdiff_t>(n_train)));
  s.validation.assign(std::make_move_iterator(windows.begin() + static_cast<std::ptrdiff_t>(n_train)),
                      std::make_move_iterator(windows.end()));
  return s;
}

}  // namespace teleop
