#pragma once

#include <stdexcept>
#include <string>

namespace cspnn {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition of an operation was violated (dimension mismatch,
/// non-positive radius, overlapping class groups, ...).
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Forward/evaluate was asked of a network without hidden units.
class ModelEmptyError : public Error {
 public:
  using Error::Error;
};

/// Unlearning named a unit id or class label the network does not hold.
class NotFoundError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file. `line()` is 1-based, 0 when not line-oriented.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line == 0 ? what : what + " (line " + std::to_string(line) + ")"), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Invalid experiment configuration (task parameter out of range, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace cspnn
