#pragma once

#include <stdexcept>
#include <string>

namespace lowrank {

/// Invalid configuration or malformed input (CLI exit code 1).
class config_error : public std::runtime_error {
public:
  explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A runtime safety net tripped: divergence guard, eigensolver failure,
/// threshold calibration failure (CLI exit code 2).
class numerical_guard_error : public std::runtime_error {
public:
  explicit numerical_guard_error(const std::string& msg)
      : std::runtime_error(msg) {}
};

}  // namespace lowrank
