#include "belldice/error.hpp"

namespace belldice {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidEfficiency: return "invalid-efficiency";
    case ErrorKind::kInvalidAmplitude: return "invalid-amplitude";
    case ErrorKind::kDegenerateMeasurement: return "degenerate-measurement";
    case ErrorKind::kInvalidSource: return "invalid-source";
    case ErrorKind::kInvalidParameter: return "invalid-parameter";
    case ErrorKind::kTruncationInsufficient: return "truncation-insufficient";
    case ErrorKind::kZeroProbabilityCondition: return "zero-probability-condition";
    case ErrorKind::kBracketInvalid: return "bracket-invalid";
    case ErrorKind::kIoError: return "io-error";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& detail)
    : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind) {}

void raise(ErrorKind kind, const std::string& detail) { throw Error(kind, detail); }

}  // namespace belldice
