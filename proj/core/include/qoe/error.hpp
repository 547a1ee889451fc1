#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qoe {

// Base for every error thrown by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input does not satisfy a size or dimension precondition.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Malformed text input. Carries the 1-based line number when known (0 otherwise).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// A file could not be opened, written, or decoded.
class IoError : public Error {
 public:
  using Error::Error;
};

// A statistic or fit is undefined for the given data (zero variance, one class, ...).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

// A value falls outside its permitted domain.
class RangeError : public Error {
 public:
  using Error::Error;
};

// Data is well-formed but inconsistent (e.g. a subject lacks a reference rating).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// An iterative solver stopped without meeting its convergence criterion.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace qoe
