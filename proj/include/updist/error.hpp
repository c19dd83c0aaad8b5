#pragma once

#include <stdexcept>
#include <string>

namespace updist {

/// Error categories. Values double as C API return codes and CLI exit codes
/// (run failures map to 1, configuration problems to 2).
enum class ErrorKind : int {
  kRun = 1,
  kConfig = 2,
  kInvalidArgument = 3,
  kNumeric = 4,
  kIo = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace updist
