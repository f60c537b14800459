#pragma once

#include <stdexcept>
#include <string>

namespace flowercell {

// Malformed input: non-convex polygon, origin not interior, bad config.
struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Argument outside the region where an operation is defined.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

struct NumericError : std::runtime_error {
  NumericError(const std::string& what, double achieved_error)
      : std::runtime_error(what), achieved(achieved_error) {}
  double achieved;
};

struct UnboundedCellError : std::runtime_error {
  UnboundedCellError(const std::string& what, double radius)
      : std::runtime_error(what), radius_reached(radius) {}
  double radius_reached;
};

// Operation requested for a body kind it does not support (e.g. smooth-only law on a polygon).
struct UnsupportedKindError : std::logic_error {
  using std::logic_error::logic_error;
};

}  // namespace flowercell
