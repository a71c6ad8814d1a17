#pragma once

// JSON-Lines record schemas and config files.
//
//   problem:   {"id", "question", "difficulty", "ground_truth"}
//   response:  {"problem_id", "text", "correct", "length"?, "truncated"?,
//               "logprob_policy"?, "logprob_ref"?}
//
// Reward config keys follow the RL coefficient table: nothink_bonus_coef,
// count_coef, block_len_coef, seg_count_coef, accuracy_threshold_low,
// accuracy_threshold_high, plus clip_ratio_low, clip_ratio_high,
// block_len_normalizer, pair_threshold and dpo_beta.

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "blockcot/corpus_segmenter.hpp"
#include "blockcot/metrics.hpp"
#include "blockcot/records.hpp"
#include "blockcot/rl_objective.hpp"
#include "blockcot/sim_policy.hpp"

namespace blockcot::io {

using Json = nlohmann::ordered_json;

// Record-level errors throw Error{MalformedRecord}.
ProblemRecord problem_from_json(const Json& j);
Json to_json(const ProblemRecord& p);

SampledResponse response_from_json(const Json& j,
                                   const format::LengthFn& length_fn = format::whitespace_token_count,
                                   format::ParseMode mode = format::ParseMode::Strict);
Json to_json(const SampledResponse& r);

Json to_json(const format::ReasoningTrace& t);
Json to_json(const format::ConsistencyReport& c);
Json to_json(const rl::AdvantageBreakdown& a);
Json to_json(const rl::Multipliers& m);
Json to_json(const rl::RolloutSummary& s);
Json to_json(const segment::SegmentationReport& r);
Json to_json(const metrics::EvalReport& e);
Json to_json(const sim::SweepRow& row, std::uint64_t max_count);

// Unknown keys are rejected with InvalidConfig.
rl::RewardConfig reward_config_from_json(const Json& j);
Json to_json(const rl::RewardConfig& c);

// Anchors accept either explicit "logits" (null means -inf) or a
// {"peak", "width"} bump.
sim::SimPolicyConfig sim_config_from_json(const Json& j);
Json to_json(const sim::SimPolicyConfig& c);

Json load_json_file(const std::string& path);

struct LineError {
  std::size_t line = 0;
  std::string message;
};

// Calls `on_record` for each non-blank line that parses as a JSON object and
// `on_error` for each one that does not. Line numbers are 1-based.
void read_jsonl(std::istream& in, const std::function<void(std::size_t, Json)>& on_record,
                const std::function<void(const LineError&)>& on_error);

// Throws MalformedRecord on bad lines or duplicate ids.
std::vector<ProblemRecord> read_problems(std::istream& in);
std::vector<ProblemRecord> read_problems_file(const std::string& path);

}  // namespace blockcot::io
