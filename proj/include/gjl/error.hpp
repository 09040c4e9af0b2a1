#pragma once

#include <stdexcept>
#include <string>

namespace gjl {

/// Failure categories shared by every module. The numeric values are the
/// process exit codes used by the command-line tool.
enum class ErrorKind : int {
  InvalidArgument = 2,
  Domain = 3,
  Numeric = 4,
  InvalidState = 5,
  Internal = 6,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

}  // namespace gjl
