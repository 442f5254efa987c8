#pragma once

#include <stdexcept>
#include <string>

namespace photonkit {

// Error taxonomy mirrors the CLI exit-code contract:
// config/domain -> 2, numeric -> 3, I/O -> 4.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

struct IoError : std::runtime_error {
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace photonkit
