#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace chargetune {

/// Input outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The requested quantity is not uniquely defined (e.g. steady state in the dark).
class DegenerateSystemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative solver exhausted its budget.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, int iterations, double last_residual)
      : std::runtime_error(what), iterations_(iterations), last_residual_(last_residual) {}

  int iterations() const noexcept { return iterations_; }
  double last_residual() const noexcept { return last_residual_; }

 private:
  int iterations_;
  double last_residual_;
};

/// Malformed input file; carries the 1-based line number (0 when not line-specific).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(line ? what + " (line " + std::to_string(line) + ")" : what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Run configuration failed validation.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace chargetune
