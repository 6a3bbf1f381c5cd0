#pragma once

#include <stdexcept>
#include <string>

namespace deepdist {

// Malformed arguments: unknown ids, size mismatches, empty inputs.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Numerical/model validation failures (non-reversible Q, bad pi, ...).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Bad experiment or algorithm configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A test could not be decided (e.g. a four-point test over infinite distances).
class NoDecisionError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Requested operation is not defined for this state space.
class UnsupportedError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Three-point weight requested from an infinite deep distance.
class UndefinedWeightError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// File parse failures.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace deepdist
