#include "blockcot/dast_dpo.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace blockcot::dast {

BudgetStats token_length_budget(std::span<const SampledResponse> group) {
  if (group.empty()) throw Error(ErrorCode::EmptyGroup, "cannot budget an empty response group");
  const auto& pid = group.front().problem_id;
  std::size_t correct = 0;
  double sum = 0.0;
  std::uint64_t max_len = 0;
  for (const auto& r : group) {
    if (r.problem_id != pid) {
      throw Error(ErrorCode::MixedGroup,
                  "group mixes problems '" + pid + "' and '" + r.problem_id + "'");
    }
    if (r.correct) ++correct;
    sum += static_cast<double>(r.length);
    max_len = std::max(max_len, r.length);
  }
  const double s = static_cast<double>(group.size());
  BudgetStats st;
  st.p = static_cast<double>(correct) / s;
  st.mean_length = sum / s;
  st.max_length = max_len;
  st.budget = st.p * st.mean_length + static_cast<double>(max_len);
  return st;
}

double calibrated_reward(const SampledResponse& response, const BudgetStats& stats) {
  if (!(stats.budget > 0.0)) {
    throw Error(ErrorCode::ZeroBudget, "token length budget is zero for problem '" +
                                           response.problem_id + "'");
  }
  const double lambda = (static_cast<double>(response.length) - stats.budget) / stats.budget;
  if (response.correct) return std::max(-0.5 * lambda + 0.5, 0.1);
  return std::min(0.9 * lambda - 0.1, -0.1);
}

std::vector<double> group_rewards(std::span<const SampledResponse> group) {
  const auto stats = token_length_budget(group);
  std::vector<double> out;
  out.reserve(group.size());
  for (const auto& r : group) out.push_back(calibrated_reward(r, stats));
  return out;
}

std::vector<PreferencePair> build_preference_pairs(std::span<const SampledResponse> group,
                                                   std::span<const double> rewards, double delta) {
  if (rewards.size() != group.size()) {
    throw Error(ErrorCode::MalformedRecord, "reward count does not match group size");
  }
  std::vector<PreferencePair> pairs;
  for (std::size_t j = 0; j < group.size(); ++j) {
    for (std::size_t k = 0; k < group.size(); ++k) {
      if (j == k) continue;
      if (!(rewards[j] - rewards[k] > delta)) continue;
      if (group[j].trace.declared_count > group[k].trace.declared_count) continue;
      pairs.push_back({j, k, group[j], group[k], rewards[j], rewards[k]});
    }
  }
  return pairs;
}

std::vector<PreferencePair> build_preference_pairs(std::span<const SampledResponse> group,
                                                   double delta) {
  const auto rewards = group_rewards(group);
  return build_preference_pairs(group, rewards, delta);
}

double neg_log_sigmoid(double x) {
  // -log(1 / (1 + e^-x)) = log1p(e^-x), rearranged to keep exp() bounded.
  if (x >= 0.0) return std::log1p(std::exp(-x));
  return -x + std::log1p(std::exp(x));
}

double dpo_loss(const PreferencePair& pair, double beta) {
  const auto& c = pair.chosen;
  const auto& r = pair.rejected;
  if (!c.logprob_policy || !c.logprob_ref || !r.logprob_policy || !r.logprob_ref) {
    throw Error(ErrorCode::MissingLogProb, "dpo_loss needs policy and reference log-probs on both responses");
  }
  const double policy_margin = *c.logprob_policy - *r.logprob_policy;
  const double ref_margin = *c.logprob_ref - *r.logprob_ref;
  return neg_log_sigmoid(beta * (policy_margin - ref_margin));
}

}  // namespace blockcot::dast
