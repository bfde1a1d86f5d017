#pragma once

#include <stdexcept>
#include <string>

namespace feistel_lab {

/// Raised when a caller violates an operation's precondition (width
/// mismatch, invalid parameters, unsupported structure). The CLI maps it to
/// exit code 1.
class UsageError : public std::invalid_argument {
 public:
  explicit UsageError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace feistel_lab
