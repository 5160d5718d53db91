#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ifrl {

enum class ErrorKind {
  kValidation,   // input violates a schema or type invariant
  kUnsupported,  // rule_type unknown to this binary (dataset/binary version skew)
  kIo,           // file system failure
  kNetwork,      // transport failure, retryable
  kProtocol,     // malformed reply from a remote peer, not retryable
  kNumeric,      // non-finite values during training or scoring
  kInternal,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace ifrl
