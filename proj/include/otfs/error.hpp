#pragma once

#include <stdexcept>
#include <string>

namespace otfs {

/// Raised when inputs violate an operation's preconditions (shapes, ranges,
/// malformed files). Maps to CLI exit code 1.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when a solver cannot produce a trustworthy answer (numerical
/// breakdown, pivot limit). Maps to CLI exit code 2.
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace otfs
