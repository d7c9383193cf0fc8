#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace freepick {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes or variable counts of the operands do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Non-finite input, tolerance violations inside a numerical kernel.
class NumericsError : public Error {
 public:
  using Error::Error;
};

/// Polynomial text that does not conform to the grammar.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " at position " + std::to_string(position)),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// A point lies outside G_delta (or outside the variety) where it must lie inside.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed problem, realization or parametrization files.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace freepick
