#pragma once

#include <stdexcept>
#include <string>

namespace consensus_lab {

/// Malformed arguments: wrong sizes, out-of-range probabilities, self-arcs.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An operation was called on a value that violates its documented
/// precondition (e.g. level function of a cyclic graph).
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A computation would exceed an explicit resource limit.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace consensus_lab
