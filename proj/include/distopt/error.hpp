#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace distopt {

enum class ErrorCode {
  // manifest ingest
  kMissingLabel,
  kDuplicateLocator,
  kEmptyClass,
  kUnreadableSource,
  kTooFewClasses,
  // class configuration
  kLimitOrder,
  kFactorOutOfRange,
  kOffsetOutOfRange,
  kAvailabilityExceeded,
  kMissingClassSpec,
  kConfigInvalid,
  // sampling
  kQuotaExceedsAvailability,
  // optimizer
  kNonPositiveObjective,
  kDivisionDomain,
  // trainers
  kInvalidCurve,
  kDegenerateData,
  kTimeout,
  kNonZeroExit,
  kMalformedResponse,
  kDimensionMismatch,
  kNonFiniteObjective,
  // checkpoints and expansion
  kManifestDrift,
  kCorruptCheckpoint,
  kZeroAnchorFactor,
  kBudgetTooSmall,
};

std::string_view to_string(ErrorCode code);

// True for errors caused by user-supplied configuration or input files
// rather than by a failure while the run was executing.
bool is_config_error(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace distopt
