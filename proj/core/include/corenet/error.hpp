#pragma once

#include <stdexcept>
#include <string>

namespace corenet {

enum class ErrorKind {
  kDimensionMismatch,
  kInvalidArgument,
  kFormat,
  kChecksum,
  kNotFound,
  kConvergence,
  kDivergence,
  kInsufficientData,
  kNoPositiveMass,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace corenet
