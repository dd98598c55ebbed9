#pragma once

#include <stdexcept>
#include <string>

namespace momentflow {

// Root of every error the engine throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Mismatched vector lengths and similar shape problems.
class StructuralError : public Error {
 public:
  using Error::Error;
};

// Argument outside the domain of an operation (empty set, bad sum, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// A moment of some order was needed but the spec does not provide it,
// or an implementation cap on degree/power was exceeded.
class OrderError : public Error {
 public:
  using Error::Error;
};

// Unknown coefficient id, variable name, or decision label.
class LookupError : public Error {
 public:
  using Error::Error;
};

// A moment-table entry was read before it was produced.
class PropagationError : public Error {
 public:
  using Error::Error;
};

// A request could not be routed to a panel.
class RoutingError : public Error {
 public:
  using Error::Error;
};

// An operation's structural precondition does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// The Monte Carlo oracle cannot sample from a belief.
class CapabilityError : public Error {
 public:
  using Error::Error;
};

// Malformed network document.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace momentflow
