#pragma once

#include <stdexcept>
#include <string>

namespace tidalflow {

enum class ErrorCode {
  ParseError,
  UnknownAccess,
  NegativeFlow,
  UnknownPool,
  AllocationOutOfRange,
  ZeroSaturationFlow,
  SearchSpaceTooLarge,
  InvalidGreenRatio,
  Oversaturated,
  NoFlow,
  InfeasibleDemand,
  NonpositiveLostTime,
  InfeasiblePlan,
  NonReciprocal,
  NonPositiveEntry,
  DimensionTooLarge,
  DegenerateTable,
  MissingScaler,
  UndefinedRatio,
  ShapeMismatch,
  NoCandidates,
  InfeasibleLocalPlan,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace tidalflow
