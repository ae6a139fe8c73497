#pragma once

#include <stdexcept>
#include <string>

namespace spdeapprox {

/// Malformed or inconsistent input (configs, dimensions, preconditions).
/// The CLI maps it to exit code 2.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A computation had to stop: non-finite state, exhausted quadrature budget.
/// The CLI maps it to exit code 3.
class NumericalAbort : public std::runtime_error {
 public:
  NumericalAbort(const std::string& what, double at_time = 0.0)
      : std::runtime_error(what), time_(at_time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

}  // namespace spdeapprox
