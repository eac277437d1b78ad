#pragma once

#include <stdexcept>
#include <string>

namespace triqrng {

// Precondition violations throw std::invalid_argument. The types below cover
// runtime failures that callers may want to handle separately.

/// Root finder could not bracket or converge.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A raw-block source ran dry before the requested output was assembled.
class StreamExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Pipeline refused to start: the configured block geometry is not covered
/// by the certified min-entropy.
class StartupError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent configuration file.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace triqrng
