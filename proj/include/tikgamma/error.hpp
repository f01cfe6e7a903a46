#pragma once

#include <stdexcept>
#include <string>

namespace tikgamma {

/// A caller broke a documented precondition (grid mismatch, bad tag, bad parameter).
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure could not produce a trustworthy result.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Requested feature exists as a concept but is not supported by this solver.
class UnsupportedError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A study declined to run because its hypotheses were measured to fail.
class RefusedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A grid-based estimator was asked for a scale below its grid spacing.
class ResolutionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace tikgamma
