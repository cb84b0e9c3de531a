#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace optbpe {

// Base class for every error the library raises. Callers that only need to
// distinguish "bad input" from "library bug" can catch Error and
// ConsistencyError respectively.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed rank-file or config line.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Vocabulary violates uniqueness, density or non-emptiness.
class IntegrityError : public Error {
 public:
  using Error::Error;
};

// Token id or tier name that does not resolve.
class LookupError : public Error {
 public:
  using Error::Error;
};

// Input bytes cannot be covered by the vocabulary.
class UnsegmentableError : public Error {
 public:
  explicit UnsegmentableError(std::size_t offset)
      : Error("no vocabulary token covers byte offset " +
              std::to_string(offset)),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class InvalidUtf8Error : public Error {
 public:
  explicit InvalidUtf8Error(std::size_t offset)
      : Error("invalid UTF-8 at byte offset " + std::to_string(offset)),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// A ratio whose denominator would be zero.
class UndefinedMetricError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Request outside a documented bound (e.g. brute-force length limit).
class BoundError : public Error {
 public:
  using Error::Error;
};

// An internal invariant broke. Always a bug, never a data problem.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace optbpe
