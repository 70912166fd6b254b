#pragma once

#include <stdexcept>
#include <string>

namespace scalefree {

// Invalid caller input: out-of-range parameters, malformed options.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Base for failures that come from the numerics rather than the caller.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Level recursion asked to go past the schedule's truncation depth.
class TruncationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Finite-difference stencil leaves the domain of the evaluated branch.
class StencilDomainError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Step so small that rounding dominates the difference quotient.
class IllConditionedError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class FitError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ConvergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace scalefree
