#pragma once

#include <stdexcept>
#include <string>

namespace invman {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Query outside a grid, extent or time window.
class OutOfDomain : public Error {
 public:
  using Error::Error;
};

class PreconditionFailure : public Error {
 public:
  using Error::Error;
};

/// Inconsistent structure between related objects (ranks, dimensions, ordering).
class StructuralError : public PreconditionFailure {
 public:
  using PreconditionFailure::PreconditionFailure;
};

class DegenerateGap : public Error {
 public:
  using Error::Error;
};

class BlowUp : public Error {
 public:
  using Error::Error;
};

class ConvergenceFailure : public Error {
 public:
  using Error::Error;
};

class ContractionFailure : public ConvergenceFailure {
 public:
  ContractionFailure(const std::string& what, double measured, double bound)
      : ConvergenceFailure(what), measured_(measured), bound_(bound) {}
  double measured_factor() const { return measured_; }
  double bound() const { return bound_; }

 private:
  double measured_;
  double bound_;
};

/// A computed object violates a property it is required to have.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// Unreadable or unwritable files.
class IoError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace invman
