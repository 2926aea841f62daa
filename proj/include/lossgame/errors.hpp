#pragma once

#include <stdexcept>
#include <string>

namespace lossgame {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed textual input (partition strings, grids, config files).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Two blocks of a candidate partition share an agent.
class OverlapError : public Error {
 public:
  using Error::Error;
};

/// Some agent is not assigned to any block.
class CoverageError : public Error {
 public:
  using Error::Error;
};

/// An exhaustive enumeration was requested beyond its size guard.
class SizeLimitError : public Error {
 public:
  using Error::Error;
};

/// A bracketing/bisection solver ran out of iterations.
class NoConvergenceError : public Error {
 public:
  using Error::Error;
};

/// A payoff vector does not match the equilibrium values of its partition.
class InconsistentPayoffError : public Error {
 public:
  using Error::Error;
};

/// A constructed witness failed its own re-verification. Signals a bug.
class WitnessVerificationError : public Error {
 public:
  using Error::Error;
};

/// The stability radius was requested at a configuration that is blocked.
class NotStableError : public Error {
 public:
  using Error::Error;
};

/// No coalition has strictly more than half of the servers.
class NoFeasibleKError : public Error {
 public:
  using Error::Error;
};

}  // namespace lossgame
