#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace carnot {

enum class ErrorCode {
  kDimensionMismatch,
  kIndexOutOfRange,
  kParse,
  kInvalidArgument,
  kNotBracketGenerating,
  kOrderExceedsCap,
  kCapTooSmall,
  kZeroField,
  kZeroDriftAtPoint,
  kNonNegativeOrder,
  kRectificationFailed,
  kLeftDomain,
  kProfileSingularity,
  kNoFeasibleWitness,
  kIncompleteFamily,
  kInsufficientData,
  kConfig,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace carnot
