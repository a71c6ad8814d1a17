#pragma once

// Block-cap constrained decoding.
//
// The policy first scores every block count k in {0..K}. In override mode the
// counts outside [cap_low, cap_high] are masked to -inf, k is drawn from the
// softmax of what survives, and the response is generated conditioned on k.
// Auto mode skips the mask.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "blockcot/random.hpp"
#include "blockcot/records.hpp"

namespace blockcot::decode {

inline constexpr std::size_t kDefaultMaxBlockCount = 16;

struct BlockCountDistribution {
  // logits[k] scores block count k; -inf means impossible.
  std::vector<double> logits;

  std::size_t max_count() const { return logits.empty() ? 0 : logits.size() - 1; }
  bool has_finite_entry() const;
};

enum class CapMode { Auto, Override };

struct CapSpec {
  std::uint64_t cap_low = 0;
  std::uint64_t cap_high = 0;
  CapMode mode = CapMode::Auto;

  static CapSpec automatic() { return {}; }
  static CapSpec range(std::uint64_t low, std::uint64_t high) {
    return {low, high, CapMode::Override};
  }
  static CapSpec at_most(std::uint64_t high) { return range(0, high); }
  static CapSpec at_least(std::uint64_t low, std::uint64_t max_count) {
    return range(low, max_count);
  }

  bool admits(std::uint64_t k) const {
    return mode == CapMode::Auto || (k >= cap_low && k <= cap_high);
  }

  bool operator==(const CapSpec&) const = default;
};

// Parses a cap token: "auto", "N" (at most N), ">N" (at least N+1, up to
// max_count) or "A-B" (inclusive range). Throws InvalidCap.
CapSpec parse_cap(std::string_view token, std::uint64_t max_count);

// Inverse of parse_cap: "auto", "<=N", ">N" or "[A,B]".
std::string cap_label(const CapSpec& cap, std::uint64_t max_count);

class PolicyInterface {
 public:
  virtual ~PolicyInterface() = default;

  virtual BlockCountDistribution predict_block_logits(const ProblemRecord& prompt) const = 0;

  // Must return a trace whose declared_count equals k.
  virtual SampledResponse generate_conditioned(const ProblemRecord& prompt, std::uint64_t k,
                                               Rng& rng) const = 0;
};

// Throws InvalidCap when cap_low > cap_high, AllMasked when nothing survives.
BlockCountDistribution mask_block_logits(const BlockCountDistribution& dist, const CapSpec& cap);

// Softmax with max-subtraction; -inf entries get probability exactly 0.
// Throws AllMasked.
std::vector<double> softmax_probabilities(const BlockCountDistribution& dist);

// Inverse-CDF draw from the softmax; one engine call per draw.
std::uint64_t sample_block_count(const BlockCountDistribution& dist, Rng& rng);

// Highest-logit count (lowest index on ties).
std::uint64_t greedy_block_count(const BlockCountDistribution& dist);

struct DecodeOptions {
  bool greedy = false;
  // Extra generate calls after a PolicyViolation before giving up.
  unsigned retry_budget = 0;
  // Return the last violating response (flagged) instead of throwing.
  bool accept_violations = false;
};

struct DecodeResult {
  std::uint64_t k = 0;
  SampledResponse response;
  unsigned attempts = 1;
  bool policy_violation = false;
};

// Predict, mask, pick k, generate. Throws AllMasked or PolicyViolation.
DecodeResult decode(const PolicyInterface& policy, const ProblemRecord& prompt, const CapSpec& cap,
                    Rng& rng, const DecodeOptions& options = {});

}  // namespace blockcot::decode
