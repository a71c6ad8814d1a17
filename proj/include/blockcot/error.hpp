#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace blockcot {

enum class ErrorCode {
  MalformedTag,
  NonIntegerCount,
  ReservedTagInBody,
  EmptyGroup,
  MixedGroup,
  ZeroBudget,
  MissingLogProb,
  EmptyList,
  NonFiniteRatio,
  EmptyBatch,
  AllMasked,
  InvalidCap,
  PolicyViolation,
  InvalidConfig,
  NonPositiveDifficulty,
  MissingDifficulty,
  MalformedRecord,
};

std::string_view to_string(ErrorCode code);

// Every recoverable failure in the library surfaces as this exception type.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace blockcot
