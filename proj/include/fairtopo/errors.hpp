#pragma once

#include <stdexcept>
#include <string>

namespace fairtopo {

// Invalid inputs to the math core: degenerate groups, dimension mismatches,
// infeasible constraint sets. The CLI maps these to exit status 1.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A group with too few members for the requested metric.
class DegenerateGroupError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Unreadable, unwritable or malformed files. The CLI maps these to exit status 2.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fairtopo
