#pragma once

// Evaluation metrics: length statistics over correct responses only, accuracy on
// easy/difficult difficulty bands, a format-based bad-case ratio, and the
// block-count histogram (bucket 0 is no-think).

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>

#include "blockcot/records.hpp"

namespace blockcot::metrics {

struct DifficultyRange {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double d) const { return d >= lo && d <= hi; }
};

inline constexpr DifficultyRange kEasySplit{2.0, 4.5};
inline constexpr DifficultyRange kDifficultSplit{8.0, 9.0};

struct LengthStats {
  double mean = 0.0;
  // Population standard deviation.
  double std = 0.0;
  std::size_t count = 0;
  bool no_correct_responses = false;
};

LengthStats compute_length_stats(std::span<const SampledResponse> responses);

using DifficultyIndex = std::unordered_map<std::string, double>;

struct SplitAccuracy {
  double overall = 0.0;
  // Absent when the band holds no responses.
  std::optional<double> easy;
  std::optional<double> difficult;
  // Accuracy with bad cases removed from both numerator and denominator.
  std::optional<double> overall_excluding_bad;
  std::size_t n_overall = 0;
  std::size_t n_easy = 0;
  std::size_t n_difficult = 0;
};

// Throws MissingDifficulty when a response's problem is not in `difficulty`.
SplitAccuracy accuracy_by_split(std::span<const SampledResponse> responses,
                                const DifficultyIndex& difficulty,
                                DifficultyRange easy = kEasySplit,
                                DifficultyRange difficult = kDifficultSplit);

struct BadCaseBreakdown {
  std::size_t total = 0;
  std::size_t bad = 0;
  std::size_t parse_failures = 0;
  std::size_t mismatches = 0;
  std::size_t truncations = 0;

  double ratio() const { return total == 0 ? 0.0 : static_cast<double>(bad) / static_cast<double>(total); }
};

// Parse failure, declared/actual mismatch, or truncation.
bool is_bad_case(const SampledResponse& response);

BadCaseBreakdown bad_case_breakdown(std::span<const SampledResponse> responses);
double bad_case_ratio(std::span<const SampledResponse> responses);

using BlockHistogram = std::map<std::uint64_t, std::uint64_t>;

// Keyed by actual block count.
BlockHistogram block_histogram(std::span<const SampledResponse> responses);

struct EvalReport {
  LengthStats length;
  BadCaseBreakdown bad_cases;
  SplitAccuracy accuracy;
  BlockHistogram histogram;
};

EvalReport evaluate(std::span<const SampledResponse> responses, const DifficultyIndex& difficulty,
                    DifficultyRange easy = kEasySplit, DifficultyRange difficult = kDifficultSplit);

}  // namespace blockcot::metrics
