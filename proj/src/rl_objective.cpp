#include "blockcot/rl_objective.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace blockcot::rl {

void RewardConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::InvalidConfig, msg); };
  const auto& l = lambda_star;
  for (double v : {l.nothink_bonus, l.count, l.block_len, l.seg_count}) {
    if (!(v >= 0.0) || !std::isfinite(v)) fail("multipliers must be finite and non-negative");
  }
  if (!(p_low >= 0.0 && p_low < p_high && p_high <= 1.0)) {
    fail("accuracy thresholds must satisfy 0 <= low < high <= 1");
  }
  if (!(eps_low > 0.0) || !(eps_high > 0.0)) fail("clip ratios must be positive");
  if (!(block_len_normalizer > 0.0)) fail("block_len_normalizer must be positive");
  if (!(pair_threshold >= 0.0)) fail("pair_threshold must be non-negative");
  if (!(dpo_beta > 0.0)) fail("dpo_beta must be positive");
}

double reference_reward_estimate(std::span<const int> ref_correct) {
  if (ref_correct.empty()) throw Error(ErrorCode::EmptyList, "no reference samples");
  std::size_t hits = 0;
  for (int c : ref_correct) hits += c != 0 ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(ref_correct.size());
}

double accuracy_scale(double p, const RewardConfig& config) {
  return std::clamp((p - config.p_low) / (config.p_high - config.p_low), 0.0, 1.0);
}

Multipliers scaled_multipliers(const RewardConfig& config, double h) {
  const auto& s = config.lambda_star;
  return {h * s.nothink_bonus, h * s.count, h * s.block_len, h * s.seg_count};
}

double mean_block_length(const format::ReasoningTrace& trace, const format::LengthFn& length_fn) {
  if (trace.blocks.empty()) return 0.0;
  std::vector<double> lens;
  lens.reserve(trace.blocks.size());
  for (const auto& b : trace.blocks) lens.push_back(static_cast<double>(length_fn(b)));
  return pairwise_sum(lens) / static_cast<double>(lens.size());
}

AdvantageBreakdown advantage(const SampledResponse& resp, double r_ref, const Multipliers& lambdas,
                             const RewardConfig& config, const format::LengthFn& length_fn) {
  const auto& t = resp.trace;
  const double declared = static_cast<double>(t.declared_count);
  const double actual = static_cast<double>(t.actual_count());

  AdvantageBreakdown a;
  a.task_delta = (resp.correct ? 1.0 : 0.0) - r_ref;
  a.nothink_bonus = t.actual_count() == 0 ? lambdas.nothink_bonus : 0.0;
  a.count_penalty = lambdas.count * declared;
  a.block_len_penalty =
      lambdas.block_len * (mean_block_length(t, length_fn) / config.block_len_normalizer);
  a.format_penalty = lambdas.seg_count * std::abs(declared - actual);
  a.total = a.task_delta + a.nothink_bonus - a.count_penalty - a.block_len_penalty - a.format_penalty;
  return a;
}

double clipped_surrogate(double ratio, double adv, const RewardConfig& config) {
  const double clipped = std::clamp(ratio, 1.0 - config.eps_low, 1.0 + config.eps_high);
  return std::min(ratio * adv, clipped * adv);
}

double ppo_surrogate(double logp_new, double logp_old, double adv, const RewardConfig& config) {
  const double ratio = std::exp(logp_new - logp_old);
  if (!std::isfinite(ratio)) {
    throw Error(ErrorCode::NonFiniteRatio,
                "exp(" + std::to_string(logp_new - logp_old) + ") is not finite");
  }
  return clipped_surrogate(ratio, adv, config);
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const auto half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

RolloutSummary rollout_objective(std::span<const RolloutSample> batch, const Multipliers& lambdas,
                                 const RewardConfig& config, const format::LengthFn& length_fn) {
  if (batch.empty()) throw Error(ErrorCode::EmptyBatch, "rollout batch is empty");
  const std::size_t n = batch.size();
  std::vector<double> delta(n), nothink(n), count(n), blen(n), mismatch(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = *batch[i].response;
    const auto& t = r.trace;
    delta[i] = (r.correct ? 1.0 : 0.0) - batch[i].r_ref;
    nothink[i] = t.actual_count() == 0 ? 1.0 : 0.0;
    count[i] = static_cast<double>(t.declared_count);
    blen[i] = mean_block_length(t, length_fn) / config.block_len_normalizer;
    mismatch[i] = std::abs(count[i] - static_cast<double>(t.actual_count()));
  }
  const double dn = static_cast<double>(n);
  RolloutSummary s;
  s.samples = n;
  s.task_delta = pairwise_sum(delta) / dn;
  s.nothink_fraction = pairwise_sum(nothink) / dn;
  s.mean_count = pairwise_sum(count) / dn;
  s.mean_block_length = pairwise_sum(blen) / dn;
  s.mean_mismatch = pairwise_sum(mismatch) / dn;
  s.total = s.task_delta + lambdas.nothink_bonus * s.nothink_fraction - lambdas.count * s.mean_count -
            lambdas.block_len * s.mean_block_length - lambdas.seg_count * s.mean_mismatch;
  return s;
}

GroupAdvantage group_advantage(std::span<const SampledResponse> group,
                               std::span<const int> ref_correct, const RewardConfig& config,
                               ScaleMode mode, std::optional<double> batch_accuracy,
                               const format::LengthFn& length_fn) {
  if (group.empty()) throw Error(ErrorCode::EmptyGroup, "no rollout samples");
  GroupAdvantage g;
  g.r_ref = reference_reward_estimate(ref_correct);
  std::size_t hits = 0;
  for (const auto& r : group) hits += r.correct ? 1 : 0;
  g.accuracy = static_cast<double>(hits) / static_cast<double>(group.size());
  switch (mode) {
    case ScaleMode::PerGroup: g.h = accuracy_scale(g.accuracy, config); break;
    case ScaleMode::Batch: g.h = accuracy_scale(batch_accuracy.value_or(g.accuracy), config); break;
    case ScaleMode::None: g.h = 1.0; break;
  }
  g.lambdas = scaled_multipliers(config, g.h);
  g.per_sample.reserve(group.size());
  for (const auto& r : group) g.per_sample.push_back(advantage(r, g.r_ref, g.lambdas, config, length_fn));
  return g;
}

}  // namespace blockcot::rl
