#pragma once

#include <stdexcept>
#include <string>

namespace pocketrl {

// Maps to exit code 2.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Maps to exit code 3; covers filesystem failures and file-format/version
// mismatches.
struct IoError : std::runtime_error {
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace pocketrl
