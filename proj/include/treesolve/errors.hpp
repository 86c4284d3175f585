#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace treesolve {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed signature: unknown sort, empty sort, or a sort with a single
/// generator (the theory requires at least two per sort).
class SignatureError : public Error {
public:
  using Error::Error;
};

/// Ill-sorted term or formula (operand sorts disagree, arity mismatch, ...).
class SortError : public Error {
public:
  using Error::Error;
};

/// Input text could not be parsed.
class ParseError : public Error {
public:
  ParseError(const std::string& msg, int line, int col)
      : Error("parse error at " + std::to_string(line) + ":" +
              std::to_string(col) + ": " + msg),
        line(line), col(col) {}
  int line;
  int col;
};

/// A normal formula exceeded the depth an operation supports.
class DepthError : public Error {
public:
  using Error::Error;
};

/// Domain enumeration requested for a sort with infinitely many trees.
class InfiniteDomainError : public Error {
public:
  using Error::Error;
};

/// Step budget or wall-clock limit exhausted.
class TimeoutError : public Error {
public:
  explicit TimeoutError(uint64_t steps)
      : Error("step budget exhausted after " + std::to_string(steps) +
              " steps"),
        steps(steps) {}
  uint64_t steps;
};

/// Invalid datatype/codatatype declarations or frontend preconditions.
class FrontendError : public Error {
public:
  using Error::Error;
};

/// Model extraction applied to a formula that is not fully simplified.
class NotSimplifiedError : public Error {
public:
  using Error::Error;
};

} // namespace treesolve
