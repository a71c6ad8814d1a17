#pragma once

// Synthetic policy with known ground truth for decoder tests and cap sweeps.
//
// Block-count logits are interpolated between difficulty anchors, so easy
// problems favour no-think and hard problems favour many blocks. Correctness
// is Bernoulli(base_accuracy(difficulty, k)) where accuracy rises with k
// towards a difficulty-dependent ceiling:
//
//   t        = clamp((d - d_min) / (d_max - d_min), 0, 1)
//   floor    = lerp(easy_floor, hard_floor, t)           accuracy at k = 0
//   ceiling  = lerp(easy_ceiling, hard_ceiling, t)
//   scale    = lerp(easy_saturation, hard_saturation, t)
//   accuracy = ceiling - (ceiling - floor) * exp(-k / scale)

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "blockcot/blockcap_decoder.hpp"
#include "blockcot/metrics.hpp"

namespace blockcot::sim {

struct LogitAnchor {
  double difficulty = 0.0;
  std::vector<double> logits;
};

struct AccuracyModel {
  double difficulty_min = 2.0;
  double difficulty_max = 9.0;
  double easy_floor = 0.90;
  double hard_floor = 0.30;
  double easy_ceiling = 0.95;
  double hard_ceiling = 0.75;
  double easy_saturation = 1.0;
  double hard_saturation = 4.0;

  double operator()(double difficulty, std::uint64_t k) const;
};

struct SimPolicyConfig {
  std::uint64_t max_count = decode::kDefaultMaxBlockCount;
  // Sorted by difficulty; each vector has max_count + 1 entries.
  std::vector<LogitAnchor> anchors;
  AccuracyModel accuracy;
  // Length units (whitespace tokens) per block; drawn uniformly from
  // mean * [1 - spread, 1 + spread].
  double block_length_mean = 60.0;
  double block_length_spread = 0.5;
  std::uint64_t response_length_base = 20;
  // Probability that a generated response declares k + 1 blocks while emitting k.
  double mismatch_rate = 0.0;
  std::uint64_t seed = 0;

  // Anchors peaking at 0 blocks for difficulty 2.0 up to 8 blocks at 9.0.
  static SimPolicyConfig defaults();

  // Throws InvalidConfig.
  void validate() const;
};

// Gaussian-bump logits -((k - peak) / width)^2 / 2 over 0..max_count.
std::vector<double> peaked_logits(std::uint64_t max_count, double peak, double width);

class SimPolicy final : public decode::PolicyInterface {
 public:
  explicit SimPolicy(SimPolicyConfig config);

  decode::BlockCountDistribution predict_block_logits(const ProblemRecord& prompt) const override;
  SampledResponse generate_conditioned(const ProblemRecord& prompt, std::uint64_t k,
                                       Rng& rng) const override;

  double base_accuracy(double difficulty, std::uint64_t k) const {
    return config_.accuracy(difficulty, k);
  }
  const SimPolicyConfig& config() const { return config_; }

 private:
  SimPolicyConfig config_;
};

// Validates and builds. Throws InvalidConfig.
std::unique_ptr<SimPolicy> make_sim_policy(SimPolicyConfig config);

// `count` problems cycling through difficulties 2.0, 2.5, ..., 9.0.
std::vector<ProblemRecord> default_problems(std::size_t count);

struct SweepCap {
  std::string label;
  decode::CapSpec cap;
};

struct SweepRow {
  std::string label;
  decode::CapSpec cap;
  std::size_t samples = 0;
  metrics::LengthStats length;
  metrics::BadCaseBreakdown bad_cases;
  metrics::SplitAccuracy accuracy;
  double mean_block_count = 0.0;
  // Relative to the reference row (first auto row, else the first row):
  // accuracy in absolute points, length as a relative change.
  double delta_accuracy = 0.0;
  double delta_length = 0.0;
};

struct SweepReport {
  std::vector<SweepRow> rows;
  std::size_t reference_row = 0;
};

struct SweepOptions {
  std::uint64_t seed = 0;
  metrics::DifficultyRange easy = metrics::kEasySplit;
  metrics::DifficultyRange difficult = metrics::kDifficultSplit;
};

// Each (problem, sample) uses the same random stream under every cap.
SweepReport run_cap_sweep(const decode::PolicyInterface& policy,
                          const std::vector<ProblemRecord>& problems,
                          const std::vector<SweepCap>& caps, std::size_t n_per,
                          const SweepOptions& options = {});

std::string render_sweep_table(const SweepReport& report);

}  // namespace blockcot::sim
