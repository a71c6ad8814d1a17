#include "blockcot/metrics.hpp"

#include <cmath>
#include <vector>

#include "blockcot/rl_objective.hpp"

namespace blockcot::metrics {

LengthStats compute_length_stats(std::span<const SampledResponse> responses) {
  std::vector<double> lens;
  for (const auto& r : responses) {
    if (r.correct) lens.push_back(static_cast<double>(r.length));
  }
  LengthStats s;
  s.count = lens.size();
  if (lens.empty()) {
    s.no_correct_responses = true;
    return s;
  }
  const double n = static_cast<double>(lens.size());
  s.mean = rl::pairwise_sum(lens) / n;
  std::vector<double> sq;
  sq.reserve(lens.size());
  for (double v : lens) sq.push_back((v - s.mean) * (v - s.mean));
  s.std = std::sqrt(rl::pairwise_sum(sq) / n);
  return s;
}

bool is_bad_case(const SampledResponse& response) {
  const auto& t = response.trace;
  return !t.parsed_cleanly() || t.declared_count != t.actual_count() || response.truncated;
}

SplitAccuracy accuracy_by_split(std::span<const SampledResponse> responses,
                                const DifficultyIndex& difficulty, DifficultyRange easy,
                                DifficultyRange difficult) {
  SplitAccuracy a;
  std::size_t hit = 0, hit_easy = 0, hit_hard = 0, clean = 0, hit_clean = 0;
  for (const auto& r : responses) {
    auto it = difficulty.find(r.problem_id);
    if (it == difficulty.end()) {
      throw Error(ErrorCode::MissingDifficulty, "no difficulty for problem '" + r.problem_id + "'");
    }
    const double d = it->second;
    ++a.n_overall;
    hit += r.correct;
    if (easy.contains(d)) {
      ++a.n_easy;
      hit_easy += r.correct;
    }
    if (difficult.contains(d)) {
      ++a.n_difficult;
      hit_hard += r.correct;
    }
    if (!is_bad_case(r)) {
      ++clean;
      hit_clean += r.correct;
    }
  }
  auto frac = [](std::size_t num, std::size_t den) {
    return static_cast<double>(num) / static_cast<double>(den);
  };
  if (a.n_overall > 0) a.overall = frac(hit, a.n_overall);
  if (a.n_easy > 0) a.easy = frac(hit_easy, a.n_easy);
  if (a.n_difficult > 0) a.difficult = frac(hit_hard, a.n_difficult);
  if (clean > 0) a.overall_excluding_bad = frac(hit_clean, clean);
  return a;
}

BadCaseBreakdown bad_case_breakdown(std::span<const SampledResponse> responses) {
  BadCaseBreakdown b;
  for (const auto& r : responses) {
    ++b.total;
    const auto& t = r.trace;
    b.parse_failures += !t.parsed_cleanly();
    b.mismatches += t.declared_count != t.actual_count();
    b.truncations += r.truncated;
    b.bad += is_bad_case(r);
  }
  return b;
}

double bad_case_ratio(std::span<const SampledResponse> responses) {
  return bad_case_breakdown(responses).ratio();
}

BlockHistogram block_histogram(std::span<const SampledResponse> responses) {
  BlockHistogram h;
  for (const auto& r : responses) ++h[r.trace.actual_count()];
  return h;
}

EvalReport evaluate(std::span<const SampledResponse> responses, const DifficultyIndex& difficulty,
                    DifficultyRange easy, DifficultyRange difficult) {
  EvalReport e;
  e.length = compute_length_stats(responses);
  e.bad_cases = bad_case_breakdown(responses);
  e.accuracy = accuracy_by_split(responses, difficulty, easy, difficult);
  e.histogram = block_histogram(responses);
  return e;
}

}  // namespace blockcot::metrics
