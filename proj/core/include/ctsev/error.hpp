#pragma once

#include <stdexcept>
#include <string>

namespace ctsev {

// Data errors: bad input, infeasible requests, degenerate numerics. The CLI
// maps every Error to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidGeometryError : public Error {
 public:
  using Error::Error;
};

class InvalidInputError : public Error {
 public:
  using Error::Error;
};

// A file's columns or a model's feature ids don't line up with what the
// consumer expects.
class SchemaError : public InvalidInputError {
 public:
  using InvalidInputError::InvalidInputError;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class SpecError : public Error {
 public:
  using Error::Error;
};

class DegenerateError : public Error {
 public:
  using Error::Error;
};

class InfeasibleError : public Error {
 public:
  using Error::Error;
};

// Broken internal invariant; never the caller's fault. Exit code 3.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace ctsev
