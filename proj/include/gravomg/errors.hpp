#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gravomg {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file. `line` is 1-based, 0 when not tied to a line.
class ParseError : public Error {
public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

/// A file feature this reader does not handle (property type, encoding).
class UnsupportedFormatError : public ParseError {
public:
  using ParseError::ParseError;
};

/// Input that is well formed but too small or empty to work with.
class DegenerateInputError : public Error {
public:
  using Error::Error;
};

class DimensionError : public Error {
public:
  using Error::Error;
};

/// A relaxation sweep would divide by a (numerically) zero diagonal entry.
/// `level` is the 1-based hierarchy level, 0 when raised outside a hierarchy.
class ZeroDiagonalError : public Error {
public:
  ZeroDiagonalError(std::size_t index, std::size_t level = 0)
      : Error("zero diagonal entry at row " + std::to_string(index) +
              (level ? " on level " + std::to_string(level) : std::string())),
        index_(index), level_(level) {}
  std::size_t index() const { return index_; }
  std::size_t level() const { return level_; }

private:
  std::size_t index_;
  std::size_t level_;
};

class NotPositiveDefiniteError : public Error {
public:
  NotPositiveDefiniteError(std::size_t pivot)
      : Error("matrix is not positive definite (pivot " + std::to_string(pivot) + ")"),
        pivot_(pivot) {}
  std::size_t pivot() const { return pivot_; }

private:
  std::size_t pivot_;
};

}  // namespace gravomg
