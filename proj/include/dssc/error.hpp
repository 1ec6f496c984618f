#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dssc {

// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A configuration value is outside its admissible range.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Operand shapes do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Data violates an operation's input contract (e.g. an all-zero column).
class InputError : public Error {
 public:
  using Error::Error;
};

// A file is structurally wrong: empty, truncated, bad magic, ragged rows.
class FormatError : public Error {
 public:
  using Error::Error;
};

// A token in a text file could not be read as a number.
class ParseError : public FormatError {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : FormatError(what + " (line " + std::to_string(line) + ", column " +
                    std::to_string(column) + ")"),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

// A matrix fails a numerical precondition; `row()` names the offender.
class PreconditionError : public Error {
 public:
  PreconditionError(const std::string& what, std::ptrdiff_t row)
      : Error(what), row_(row) {}
  std::ptrdiff_t row() const { return row_; }

 private:
  std::ptrdiff_t row_;
};

// The graph carries no mass (zero volume).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

// A series that was requested in closed form does not converge.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

// Problem is too large for a dense test oracle.
class SizeError : public Error {
 public:
  using Error::Error;
};

}  // namespace dssc
