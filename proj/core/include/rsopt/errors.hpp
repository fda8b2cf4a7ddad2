#pragma once

#include <stdexcept>
#include <string>

namespace rsopt {

/// Raised for invalid scenario parameters or malformed configuration.
/// `key()` names the offending parameter when one is known.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what, std::string key = {})
      : std::invalid_argument(what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

/// Raised when a numerical routine cannot produce a usable result
/// (rank-deficient data, identity violations, malformed solver input).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace rsopt
