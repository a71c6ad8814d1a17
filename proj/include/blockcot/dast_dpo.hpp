#pragma once

// Difficulty-adaptive reward calibration and preference-pair construction.
//
// For the s responses sampled for one problem:
//
//   budget = p * mean_length + max_length          p = correct / s
//   lambda = (L - budget) / budget
//   r      = max(-0.5 lambda + 0.5, 0.1)           if correct
//            min( 0.9 lambda - 0.1, -0.1)          otherwise
//
// A pair (chosen=j, rejected=k) is emitted when r(j) - r(k) > delta and j does
// not declare more reasoning blocks than k.

#include <cstddef>
#include <span>
#include <vector>

#include "blockcot/records.hpp"

namespace blockcot::dast {

inline constexpr double kDefaultPairThreshold = 0.3;
inline constexpr double kDefaultDpoBeta = 0.1;

struct BudgetStats {
  double p = 0.0;
  double mean_length = 0.0;
  std::uint64_t max_length = 0;
  double budget = 0.0;
};

struct PreferencePair {
  std::size_t chosen_index = 0;
  std::size_t rejected_index = 0;
  SampledResponse chosen;
  SampledResponse rejected;
  double reward_chosen = 0.0;
  double reward_rejected = 0.0;

  double reward_gap() const { return reward_chosen - reward_rejected; }
};

// Throws EmptyGroup, or MixedGroup when problem ids differ.
BudgetStats token_length_budget(std::span<const SampledResponse> group);

// Throws ZeroBudget when stats.budget <= 0 (every response was empty).
double calibrated_reward(const SampledResponse& response, const BudgetStats& stats);

// Reward of each response against its own group's budget.
std::vector<double> group_rewards(std::span<const SampledResponse> group);

// Ordered scan over all (j, k), j != k, in index order.
std::vector<PreferencePair> build_preference_pairs(std::span<const SampledResponse> group,
                                                   std::span<const double> rewards,
                                                   double delta = kDefaultPairThreshold);

// Computes rewards with group_rewards first.
std::vector<PreferencePair> build_preference_pairs(std::span<const SampledResponse> group,
                                                   double delta = kDefaultPairThreshold);

// -log sigmoid(beta * [(pi_c - pi_r) - (ref_c - ref_r)]). Throws MissingLogProb.
double dpo_loss(const PreferencePair& pair, double beta = kDefaultDpoBeta);

// Numerically stable -log(sigmoid(x)).
double neg_log_sigmoid(double x);

}  // namespace blockcot::dast
