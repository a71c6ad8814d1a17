#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "blockcot/cot_format.hpp"

namespace blockcot {

struct ProblemRecord {
  std::string id;
  std::string question;
  double difficulty = 0.0;
  std::string ground_truth;
};

// One sampled response attached to a problem.
struct SampledResponse {
  format::ReasoningTrace trace;
  bool correct = false;
  // Full-response length (think section plus answer) in the configured unit.
  std::uint64_t length = 0;
  std::string problem_id;
  std::optional<double> logprob_policy;
  std::optional<double> logprob_ref;
  // Generation hit the length limit.
  bool truncated = false;
};

// Parses `text` and fills in the length from the full text.
SampledResponse make_response(std::string problem_id, std::string_view text, bool correct,
                              const format::LengthFn& length_fn = format::whitespace_token_count,
                              format::ParseMode mode = format::ParseMode::Strict);

}  // namespace blockcot
