#include "blockcot/error.hpp"

namespace blockcot {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedTag: return "MalformedTag";
    case ErrorCode::NonIntegerCount: return "NonIntegerCount";
    case ErrorCode::ReservedTagInBody: return "ReservedTagInBody";
    case ErrorCode::EmptyGroup: return "EmptyGroup";
    case ErrorCode::MixedGroup: return "MixedGroup";
    case ErrorCode::ZeroBudget: return "ZeroBudget";
    case ErrorCode::MissingLogProb: return "MissingLogProb";
    case ErrorCode::EmptyList: return "EmptyList";
    case ErrorCode::NonFiniteRatio: return "NonFiniteRatio";
    case ErrorCode::EmptyBatch: return "EmptyBatch";
    case ErrorCode::AllMasked: return "AllMasked";
    case ErrorCode::InvalidCap: return "InvalidCap";
    case ErrorCode::PolicyViolation: return "PolicyViolation";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::NonPositiveDifficulty: return "NonPositiveDifficulty";
    case ErrorCode::MissingDifficulty: return "MissingDifficulty";
    case ErrorCode::MalformedRecord: return "MalformedRecord";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace blockcot
