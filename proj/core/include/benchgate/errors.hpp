#pragma once

#include <stdexcept>
#include <string>

namespace benchgate {

/// Base class for all benchgate errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file or field (bad syntax, wrong type, unparseable number).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Structurally valid input that violates a model invariant
/// (negative duration, dangling edge, duplicate key, bad config value).
class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace benchgate
