#pragma once

#include <stdexcept>
#include <string>

namespace belldice {

// Failure categories surfaced by the library. The CLI maps these onto its
// exit codes, and tests match on the kind rather than the message text.
enum class ErrorKind {
  kInvalidEfficiency,
  kInvalidAmplitude,
  kDegenerateMeasurement,
  kInvalidSource,
  kInvalidParameter,
  kTruncationInsufficient,
  kZeroProbabilityCondition,
  kBracketInvalid,
  kIoError,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail);
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void raise(ErrorKind kind, const std::string& detail);

}  // namespace belldice
