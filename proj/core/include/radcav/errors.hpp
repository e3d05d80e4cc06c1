#pragma once

#include <stdexcept>
#include <string>

namespace radcav {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// State or argument outside the domain of the energy or of an interpolant.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Root bracketing failed or a bracket without sign change was supplied.
class BracketError : public Error {
 public:
  using Error::Error;
};

// Malformed configuration input.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A structural assumption on the energy failed, either as a precondition
// or as a runtime invariant breach along a trajectory.
class HypothesisViolation : public Error {
 public:
  using Error::Error;
};

// The Rankine-Hugoniot residual never changed sign and the arc did not
// reach the diagonal: the trajectory cannot be connected.
class NoConnection : public Error {
 public:
  using Error::Error;
};

// More than one sign change of the connection residual.
class MultipleRoots : public Error {
 public:
  using Error::Error;
};

class OutOfRange : public Error {
 public:
  using Error::Error;
};

// Right-hand side returned NaN/Inf at an accepted point.
class NonfiniteRhs : public Error {
 public:
  using Error::Error;
};

// The integrator's step collapsed away from any admissible stopping set.
class StepUnderflow : public Error {
 public:
  using Error::Error;
};

// A rescaling grid point does not fit inside the rescaled existence interval.
class GridViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace radcav
