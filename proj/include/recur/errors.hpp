#pragma once

#include <stdexcept>
#include <string>

namespace recur {

/// Caller supplied input outside an operation's domain.
class PreconditionError : public std::invalid_argument {
 public:
  explicit PreconditionError(const std::string& what) : std::invalid_argument(what) {}
};

/// A construction failed its own post-verification. Always a bug.
class InternalError : public std::logic_error {
 public:
  explicit InternalError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace recur
