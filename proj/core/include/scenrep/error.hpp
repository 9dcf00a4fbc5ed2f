#ifndef SCENREP_ERROR_HPP
#define SCENREP_ERROR_HPP

#include <stdexcept>
#include <string>

namespace scenrep {

// Failure conditions raised by the library. Codes are stable identifiers
// used for CLI diagnostics and for matching in tests.
enum class ErrorCode {
  EmptySignal,
  NonMonotonicTimestamps,
  InsufficientSamplesForSpline,
  MissingStatic,
  ZeroVariance,
  DegenerateSplit,
  DTooLarge,
  ZeroSingularValue,
  LayoutMismatch,
  SolverNonConvergence,
  AllPointsIdentical,
  NegativeDuration,
  SingularCovariance,
  NonConvergence,
  CorrelationDegenerate,
  InvalidArgument,
  ParseError,
  IoError,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code),
        message_(message) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

}  // namespace scenrep

#endif  // SCENREP_ERROR_HPP
