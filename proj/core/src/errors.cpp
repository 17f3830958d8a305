#include "epipanel/errors.hpp"

namespace epipanel {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::DuplicateRow: return "DuplicateRow";
    case ErrorCode::UnparseableDate: return "UnparseableDate";
    case ErrorCode::NonNumericValue: return "NonNumericValue";
    case ErrorCode::NegativeCount: return "NegativeCount";
    case ErrorCode::ZeroEnrollmentCounty: return "ZeroEnrollmentCounty";
    case ErrorCode::AllSharesZero: return "AllSharesZero";
    case ErrorCode::UnknownColumn: return "UnknownColumn";
    case ErrorCode::EmptyAfterDeletion: return "EmptyAfterDeletion";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::TooFewUnits: return "TooFewUnits";
    case ErrorCode::NoSecondHalf: return "NoSecondHalf";
    case ErrorCode::SingleCluster: return "SingleCluster";
    case ErrorCode::DegenerateClustering: return "DegenerateClustering";
    case ErrorCode::StepTooLarge: return "StepTooLarge";
    case ErrorCode::NegativeState: return "NegativeState";
    case ErrorCode::EmptyEventCell: return "EmptyEventCell";
    case ErrorCode::NoValidControl: return "NoValidControl";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Error";
}

}  // namespace epipanel
