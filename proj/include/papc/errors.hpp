#pragma once

#include <stdexcept>
#include <string>

namespace papc {

/// Invalid user-supplied configuration or malformed input data.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical routine could not produce a usable result.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Prices were computed from a different power state than the one supplied.
class StalePriceError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace papc
