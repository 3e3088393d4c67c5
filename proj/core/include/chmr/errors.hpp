#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace chmr {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed expression or catalog text. `offset` is the byte position in the input.
class ParseError : public Error {
 public:
  ParseError(std::size_t offset, const std::string& what)
      : Error("offset " + std::to_string(offset) + ": " + what), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// A symbol, variable or derivative that the catalog does not allow.
class DomainError : public Error {
 public:
  using Error::Error;
};

class DivisionByZero : public Error {
 public:
  DivisionByZero() : Error("division by the zero expression") {}
  explicit DivisionByZero(const std::string& what) : Error(what) {}
};

/// Reduction stopped because the step budget ran out. Distinct from a nonzero remainder.
class BudgetExhausted : public Error {
 public:
  explicit BudgetExhausted(std::size_t steps)
      : Error("reduction step budget exhausted after " + std::to_string(steps) + " steps"),
        steps_(steps) {}
  std::size_t steps() const noexcept { return steps_; }

 private:
  std::size_t steps_;
};

}  // namespace chmr
