#pragma once

#include <stdexcept>
#include <string>

namespace thicktri {

/// Caller violated an operation's precondition (bad dimension, out-of-range argument).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Geometric input is (numerically) degenerate: dependent points, coincident vertices.
class DegeneracyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The circumscribing "sphere" of a vertex set is a horosphere or equidistant surface.
class UnboundedCircumsphereError : public DegeneracyError {
 public:
  using DegeneracyError::DegeneracyError;
};

/// A bound formula left the principal domain of one of its sub-expressions.
class BoundDomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// No admissible value exists (schedule solve, rejection sampling in theoretical mode).
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Loaded data violates a named invariant.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input document. Carries the 1-based line and column of the failure.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : std::runtime_error(what), line_(line), column_(column) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace thicktri
