#pragma once

#include <stdexcept>
#include <string>

namespace rhomctdh {

/// Raised when a precondition on the arguments of an operation is violated.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised by integrators when a non-finite value shows up in the state.
class NumericalBlowup : public std::runtime_error {
 public:
  NumericalBlowup(const std::string& what, double time)
      : std::runtime_error(what + " (t = " + std::to_string(time) + ")"), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// Imaginary-time relaxation did not reach its energy tolerance.
class ConvergenceFailure : public std::runtime_error {
 public:
  ConvergenceFailure(const std::string& what, double last_energy)
      : std::runtime_error(what), last_energy_(last_energy) {}
  double last_energy() const noexcept { return last_energy_; }

 private:
  double last_energy_;
};

/// An internal identity that must hold analytically was violated numerically.
class ConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rhomctdh
