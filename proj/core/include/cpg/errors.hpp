#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cpg {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed MDP or parameter text. `line()` is 1-based; 0 means the
/// problem concerns the document as a whole (e.g. a missing directive).
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Policy parameters whose action layout differs from the MDP's.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Brute-force enumeration would exceed its path budget.
class EnumerationLimitError : public Error {
 public:
  EnumerationLimitError(std::size_t limit, const std::string& what)
      : Error(what), limit_(limit) {}

  std::size_t limit() const noexcept { return limit_; }

 private:
  std::size_t limit_;
};

/// Training produced a non-finite parameter or gradient.
class NonFiniteError : public Error {
 public:
  NonFiniteError(std::size_t iteration, const std::string& what)
      : Error("iteration " + std::to_string(iteration) + ": " + what),
        iteration_(iteration) {}

  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t iteration_;
};

}  // namespace cpg
