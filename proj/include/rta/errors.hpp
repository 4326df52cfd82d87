#pragma once

#include <stdexcept>
#include <string>

namespace rta {

// Error categories map onto the CLI exit codes:
//   0 success, 2 config error, 3 precondition error, 4 internal guard tripped.

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct PreconditionError : std::runtime_error {
  explicit PreconditionError(const std::string& msg) : std::runtime_error(msg) {}
};

struct InternalError : std::runtime_error {
  explicit InternalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace rta
