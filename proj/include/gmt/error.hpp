#pragma once

#include <stdexcept>
#include <string>

namespace gmt {

enum class ErrorKind {
  kInvalidArgument,
  kEmptyDomain,
  kDepthExhausted,
  kPreconditionViolated,
  kIo,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "invalid-argument";
    case ErrorKind::kEmptyDomain: return "empty-domain";
    case ErrorKind::kDepthExhausted: return "depth-exhausted";
    case ErrorKind::kPreconditionViolated: return "precondition-violated";
    case ErrorKind::kIo: return "io";
  }
  return "unknown";
}

}  // namespace gmt
