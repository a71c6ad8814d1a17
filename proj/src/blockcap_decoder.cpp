#include "blockcot/blockcap_decoder.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <string>

namespace blockcot::decode {

bool BlockCountDistribution::has_finite_entry() const {
  return std::any_of(logits.begin(), logits.end(), [](double v) { return std::isfinite(v); });
}

BlockCountDistribution mask_block_logits(const BlockCountDistribution& dist, const CapSpec& cap) {
  if (cap.mode == CapMode::Auto) return dist;
  if (cap.cap_low > cap.cap_high) {
    throw Error(ErrorCode::InvalidCap, "cap_low " + std::to_string(cap.cap_low) + " > cap_high " +
                                           std::to_string(cap.cap_high));
  }
  BlockCountDistribution out = dist;
  for (std::size_t k = 0; k < out.logits.size(); ++k) {
    if (k < cap.cap_low || k > cap.cap_high) out.logits[k] = -std::numeric_limits<double>::infinity();
  }
  if (!out.has_finite_entry()) {
    throw Error(ErrorCode::AllMasked, "cap [" + std::to_string(cap.cap_low) + ", " +
                                          std::to_string(cap.cap_high) +
                                          "] leaves no admissible block count in 0.." +
                                          std::to_string(dist.max_count()));
  }
  return out;
}

std::vector<double> softmax_probabilities(const BlockCountDistribution& dist) {
  double top = -std::numeric_limits<double>::infinity();
  for (double v : dist.logits) {
    if (std::isfinite(v)) top = std::max(top, v);
  }
  if (!std::isfinite(top)) throw Error(ErrorCode::AllMasked, "no finite block-count logit");
  std::vector<double> p(dist.logits.size(), 0.0);
  double z = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (std::isfinite(dist.logits[k])) {
      p[k] = std::exp(dist.logits[k] - top);
      z += p[k];
    }
  }
  for (double& v : p) v /= z;
  return p;
}

std::uint64_t sample_block_count(const BlockCountDistribution& dist, Rng& rng) {
  const auto p = softmax_probabilities(dist);
  const double u = uniform01(rng);
  double acc = 0.0;
  std::size_t last = 0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p[k] == 0.0) continue;
    acc += p[k];
    last = k;
    if (u < acc) return k;
  }
  // Rounding left the CDF a hair below 1; fall back to the last admissible count.
  return last;
}

std::uint64_t greedy_block_count(const BlockCountDistribution& dist) {
  if (!dist.has_finite_entry()) throw Error(ErrorCode::AllMasked, "no finite block-count logit");
  std::size_t best = 0;
  double best_v = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < dist.logits.size(); ++k) {
    if (std::isfinite(dist.logits[k]) && dist.logits[k] > best_v) {
      best_v = dist.logits[k];
      best = k;
    }
  }
  return best;
}

CapSpec parse_cap(std::string_view token, std::uint64_t max_count) {
  auto bad = [&] { return Error(ErrorCode::InvalidCap, "cannot parse cap '" + std::string(token) + "'"); };
  auto number = [&](std::string_view s) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) throw bad();
    return v;
  };
  auto floor_at = [&](std::uint64_t low) {
    if (low > max_count) throw bad();
    return CapSpec::at_least(low, max_count);
  };
  if (token == "auto") return CapSpec::automatic();
  if (token.starts_with(">=")) return floor_at(number(token.substr(2)));
  if (token.starts_with(">")) return floor_at(number(token.substr(1)) + 1);
  if (token.starts_with("<=")) return CapSpec::at_most(number(token.substr(2)));
  if (auto dash = token.find('-'); dash != std::string_view::npos) {
    auto cap = CapSpec::range(number(token.substr(0, dash)), number(token.substr(dash + 1)));
    if (cap.cap_low > cap.cap_high) throw bad();
    return cap;
  }
  return CapSpec::at_most(number(token));
}

std::string cap_label(const CapSpec& cap, std::uint64_t max_count) {
  if (cap.mode == CapMode::Auto) return "auto";
  if (cap.cap_low == 0) return "<=" + std::to_string(cap.cap_high);
  if (cap.cap_high >= max_count) return ">" + std::to_string(cap.cap_low - 1);
  return "[" + std::to_string(cap.cap_low) + "," + std::to_string(cap.cap_high) + "]";
}

DecodeResult decode(const PolicyInterface& policy, const ProblemRecord& prompt, const CapSpec& cap,
                    Rng& rng, const DecodeOptions& options) {
  const auto logits = policy.predict_block_logits(prompt);
  const auto masked = mask_block_logits(logits, cap);
  DecodeResult result;
  result.k = options.greedy ? greedy_block_count(masked) : sample_block_count(masked, rng);
  for (unsigned attempt = 0;; ++attempt) {
    result.response = policy.generate_conditioned(prompt, result.k, rng);
    result.attempts = attempt + 1;
    if (result.response.trace.declared_count == result.k) return result;
    if (attempt >= options.retry_budget) break;
  }
  if (options.accept_violations) {
    result.policy_violation = true;
    return result;
  }
  throw Error(ErrorCode::PolicyViolation,
              "policy declared " + std::to_string(result.response.trace.declared_count) +
                  " blocks for problem '" + prompt.id + "' after being conditioned on " +
                  std::to_string(result.k));
}

}  // namespace blockcot::decode
