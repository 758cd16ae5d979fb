#pragma once

#include <stdexcept>
#include <string>

namespace teleop {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A state vector or input carried a NaN/Inf into an integrator.
class StateIntegrityError : public Error {
 public:
  using Error::Error;
};

/// Channel time went backwards.
class ClockError : public Error {
 public:
  using Error::Error;
};

/// Invalid parameters, scenario files or predictor configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Network shapes do not agree with the declared topology.
class TopologyError : public Error {
 public:
  using Error::Error;
};

/// Non-finite activation, loss or gradient.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Malformed file or message. `line` is 1-based, 0 when not applicable.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace teleop
