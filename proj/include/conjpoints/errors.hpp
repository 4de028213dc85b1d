#pragma once

#include <stdexcept>
#include <string>

namespace conjpoints {

/// Violated precondition on caller-supplied data (bad dimensions, degenerate
/// inputs where nondegenerate ones are required, malformed descriptors).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure could not meet its own accuracy contract, e.g. the
/// integrator drift ceiling or a frame-alignment failure.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The requested quantity is not defined for this input (non-regular
/// crossings for the Maslov count).
class UnavailableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Wraps a failure raised inside one stage of the prescription pipeline.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& what)
      : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace conjpoints
