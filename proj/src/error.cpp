#include "distopt/error.hpp"

namespace distopt {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMissingLabel: return "MissingLabel";
    case ErrorCode::kDuplicateLocator: return "DuplicateLocator";
    case ErrorCode::kEmptyClass: return "EmptyClass";
    case ErrorCode::kUnreadableSource: return "UnreadableSource";
    case ErrorCode::kTooFewClasses: return "TooFewClasses";
    case ErrorCode::kLimitOrder: return "LimitOrder";
    case ErrorCode::kFactorOutOfRange: return "FactorOutOfRange";
    case ErrorCode::kOffsetOutOfRange: return "OffsetOutOfRange";
    case ErrorCode::kAvailabilityExceeded: return "AvailabilityExceeded";
    case ErrorCode::kMissingClassSpec: return "MissingClassSpec";
    case ErrorCode::kConfigInvalid: return "ConfigInvalid";
    case ErrorCode::kQuotaExceedsAvailability: return "QuotaExceedsAvailability";
    case ErrorCode::kNonPositiveObjective: return "NonPositiveObjective";
    case ErrorCode::kDivisionDomain: return "DivisionDomain";
    case ErrorCode::kInvalidCurve: return "InvalidCurve";
    case ErrorCode::kDegenerateData: return "DegenerateData";
    case ErrorCode::kTimeout: return "Timeout";
    case ErrorCode::kNonZeroExit: return "NonZeroExit";
    case ErrorCode::kMalformedResponse: return "MalformedResponse";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kNonFiniteObjective: return "NonFiniteObjective";
    case ErrorCode::kManifestDrift: return "ManifestDrift";
    case ErrorCode::kCorruptCheckpoint: return "CorruptCheckpoint";
    case ErrorCode::kZeroAnchorFactor: return "ZeroAnchorFactor";
    case ErrorCode::kBudgetTooSmall: return "BudgetTooSmall";
  }
  return "Unknown";
}

bool is_config_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMissingLabel:
    case ErrorCode::kDuplicateLocator:
    case ErrorCode::kEmptyClass:
    case ErrorCode::kUnreadableSource:
    case ErrorCode::kTooFewClasses:
    case ErrorCode::kLimitOrder:
    case ErrorCode::kFactorOutOfRange:
    case ErrorCode::kOffsetOutOfRange:
    case ErrorCode::kAvailabilityExceeded:
    case ErrorCode::kMissingClassSpec:
    case ErrorCode::kConfigInvalid:
    case ErrorCode::kInvalidCurve:
    case ErrorCode::kManifestDrift:
    case ErrorCode::kCorruptCheckpoint:
    case ErrorCode::kZeroAnchorFactor:
    case ErrorCode::kBudgetTooSmall:
      return true;
    default:
      return false;
  }
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace distopt
