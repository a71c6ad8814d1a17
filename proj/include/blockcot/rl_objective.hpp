#pragma once

// Reward machinery for the constrained RL stage.
//
// Per-sample advantage:
//
//   A = R - R_ref + l1 * [n_actual == 0] - l2 * n_declared
//       - l3 * mean_block_length / normalizer - l4 * |n_declared - n_actual|
//
// with the multipliers rescaled after each rollout by the accuracy-aware factor
// h(p) = clip((p - p_low) / (p_high - p_low), 0, 1).

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "blockcot/cot_format.hpp"
#include "blockcot/records.hpp"

namespace blockcot::rl {

// Non-negative Lagrange multipliers, in the order of the reward terms.
struct Multipliers {
  double nothink_bonus = 0.0;
  double count = 0.0;
  double block_len = 0.0;
  double seg_count = 0.0;

  bool operator==(const Multipliers&) const = default;
};

struct RewardConfig {
  Multipliers lambda_star{0.1, 0.05, 0.5, 0.1};
  double p_low = 0.75;
  double p_high = 0.9;
  double eps_low = 0.2;
  double eps_high = 0.28;
  double block_len_normalizer = 1.0;
  // DPO-stage knobs carried in the same file.
  double pair_threshold = 0.3;
  double dpo_beta = 0.1;

  // Throws InvalidConfig.
  void validate() const;
};

struct AdvantageBreakdown {
  double task_delta = 0.0;
  double nothink_bonus = 0.0;
  double count_penalty = 0.0;
  double block_len_penalty = 0.0;
  double format_penalty = 0.0;
  double total = 0.0;
};

// Mean of 0/1 indicators. Throws EmptyList.
double reference_reward_estimate(std::span<const int> ref_correct);

double accuracy_scale(double p, const RewardConfig& config);

Multipliers scaled_multipliers(const RewardConfig& config, double h);

// Mean block length over the actual blocks, 0 for a no-think trace.
double mean_block_length(const format::ReasoningTrace& trace,
                         const format::LengthFn& length_fn = format::whitespace_token_count);

AdvantageBreakdown advantage(const SampledResponse& resp, double r_ref, const Multipliers& lambdas,
                             const RewardConfig& config,
                             const format::LengthFn& length_fn = format::whitespace_token_count);

// min(ratio * A, clip(ratio, 1 - eps_low, 1 + eps_high) * A)
double clipped_surrogate(double ratio, double adv, const RewardConfig& config);

// ratio = exp(logp_new - logp_old). Throws NonFiniteRatio on overflow or NaN.
double ppo_surrogate(double logp_new, double logp_old, double adv, const RewardConfig& config);

struct RolloutSummary {
  std::size_t samples = 0;
  double task_delta = 0.0;
  double nothink_fraction = 0.0;
  double mean_count = 0.0;
  double mean_block_length = 0.0;
  double mean_mismatch = 0.0;
  double total = 0.0;
};

struct RolloutSample {
  const SampledResponse* response = nullptr;
  double r_ref = 0.0;
};

// Empirical Lagrangian over a batch. Throws EmptyBatch.
RolloutSummary rollout_objective(std::span<const RolloutSample> batch, const Multipliers& lambdas,
                                 const RewardConfig& config,
                                 const format::LengthFn& length_fn = format::whitespace_token_count);

// Sums in a fixed pairwise tree so results do not depend on how the batch was
// produced.
double pairwise_sum(std::span<const double> values);

// How accuracy feeds h(p).
enum class ScaleMode {
  PerGroup,  // each problem's own empirical accuracy
  Batch,     // one accuracy over the whole batch
  None,      // lambda = lambda_star
};

struct GroupAdvantage {
  double r_ref = 0.0;
  double accuracy = 0.0;
  double h = 1.0;
  Multipliers lambdas;
  std::vector<AdvantageBreakdown> per_sample;
};

// Advantages for one problem's rollout group. In Batch mode `batch_accuracy`
// replaces the group's own accuracy.
GroupAdvantage group_advantage(std::span<const SampledResponse> group,
                               std::span<const int> ref_correct, const RewardConfig& config,
                               ScaleMode mode, std::optional<double> batch_accuracy = std::nullopt,
                               const format::LengthFn& length_fn = format::whitespace_token_count);

}  // namespace blockcot::rl
