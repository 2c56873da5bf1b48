// Error types shared across the library.
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace obss {

// Incompatible grids passed to a binary field operation.
class GridMismatchError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Bad user-supplied configuration (grid sizes, profile radii, parse failures).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Infeasible exponent set; carries the violated constraint names.
class InfeasibleError : public std::runtime_error {
 public:
  InfeasibleError(std::string msg, std::vector<std::string> violated)
      : std::runtime_error(std::move(msg)), violated_(std::move(violated)) {}
  const std::vector<std::string>& violated() const { return violated_; }

 private:
  std::vector<std::string> violated_;
};

// Advective CFL violation; suggested_dt is the largest admissible step.
class CflError : public std::runtime_error {
 public:
  CflError(std::string msg, double suggested_dt)
      : std::runtime_error(std::move(msg)), suggested_dt(suggested_dt) {}
  double suggested_dt;
};

// Quotients/fits that are undefined on the given data.
class DegenerateInputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Breakdown or non-recoverable failure inside a numerical routine.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace obss
