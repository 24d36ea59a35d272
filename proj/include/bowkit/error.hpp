#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace bowkit {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad flag values, out-of-range parameters. CLI maps these to exit code 1.
class UsageError : public Error {
 public:
  using Error::Error;
};

// Malformed input data in strict mode.
class ParseError : public Error {
 public:
  ParseError(std::string message, std::uint64_t position) : Error(std::move(message)), position_(position) {}
  std::uint64_t position() const { return position_; }

 private:
  std::uint64_t position_;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

class IndexVersionError : public IndexError {
 public:
  using IndexError::IndexError;
};

class IndexChecksumError : public IndexError {
 public:
  using IndexError::IndexError;
};

class IndexTruncatedError : public IndexError {
 public:
  using IndexError::IndexError;
};

class PipelineMismatchError : public Error {
 public:
  using Error::Error;
};

// One recoverable problem found during a lenient parse. `position` is a byte
// offset for block formats and a 1-based line number for line formats; the
// message says which.
struct ParseIssue {
  std::uint64_t position = 0;
  std::string message;
};

}  // namespace bowkit
