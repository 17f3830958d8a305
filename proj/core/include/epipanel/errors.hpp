#pragma once

#include <stdexcept>
#include <string>

namespace epipanel {

// Machine-readable failure categories. Each carries a human-oriented message
// that names the offending row/column/pair where the contract requires it.
enum class ErrorCode {
  MissingColumn,
  DuplicateRow,
  UnparseableDate,
  NonNumericValue,
  NegativeCount,
  ZeroEnrollmentCounty,
  AllSharesZero,
  UnknownColumn,
  EmptyAfterDeletion,
  NoConvergence,
  RankDeficient,
  TooFewUnits,
  NoSecondHalf,
  SingleCluster,
  DegenerateClustering,
  StepTooLarge,
  NegativeState,
  EmptyEventCell,
  NoValidControl,
  ConfigError,
  IoError,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void throw_error(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace epipanel
