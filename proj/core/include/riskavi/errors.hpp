#pragma once

#include <stdexcept>
#include <string>

namespace riskavi {

// Invalid arguments are reported with std::invalid_argument. The types below
// cover the remaining failure classes callers need to tell apart.

/// Not enough stored data to satisfy a request (e.g. replay sample size).
class InsufficientData : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Environment layout could not be generated under the configured geometry.
class InfeasibleConfiguration : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A loss or parameter became NaN/Inf during training.
class NumericFailure : public std::runtime_error {
 public:
  NumericFailure(const std::string& what, long step)
      : std::runtime_error(what), step_(step) {}
  long step() const noexcept { return step_; }

 private:
  long step_;
};

/// Malformed or truncated checkpoint file.
class CorruptCheckpoint : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace riskavi
