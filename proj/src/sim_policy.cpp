#include "blockcot/sim_policy.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace blockcot::sim {
namespace {

constexpr std::array<std::string_view, 12> kWords = {
    "let", "x", "be", "the", "value", "so", "we", "check", "that", "it", "holds", "then"};

double lerp(double a, double b, double t) { return a + (b - a) * t; }

void append_words(std::string& out, std::uint64_t n, Rng& rng) {
  for (std::uint64_t i = 0; i < n; ++i) {
    if (i > 0) out.push_back(' ');
    out.append(kWords[uniform_int(rng, 0, kWords.size() - 1)]);
  }
}

}  // namespace

double AccuracyModel::operator()(double difficulty, std::uint64_t k) const {
  const double t = std::clamp((difficulty - difficulty_min) / (difficulty_max - difficulty_min), 0.0, 1.0);
  const double floor = lerp(easy_floor, hard_floor, t);
  const double ceiling = lerp(easy_ceiling, hard_ceiling, t);
  const double scale = lerp(easy_saturation, hard_saturation, t);
  return std::clamp(ceiling - (ceiling - floor) * std::exp(-static_cast<double>(k) / scale), 0.0, 1.0);
}

std::vector<double> peaked_logits(std::uint64_t max_count, double peak, double width) {
  std::vector<double> out(max_count + 1);
  for (std::uint64_t k = 0; k <= max_count; ++k) {
    const double z = (static_cast<double>(k) - peak) / width;
    out[k] = -0.5 * z * z;
  }
  return out;
}

SimPolicyConfig SimPolicyConfig::defaults() {
  SimPolicyConfig c;
  const std::array<std::pair<double, double>, 5> peaks = {
      {{2.0, 0.0}, {4.5, 2.0}, {6.0, 4.0}, {7.5, 6.0}, {9.0, 8.0}}};
  for (auto [difficulty, peak] : peaks) {
    c.anchors.push_back({difficulty, peaked_logits(c.max_count, peak, 1.0)});
  }
  return c;
}

void SimPolicyConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::InvalidConfig, msg); };
  if (anchors.empty()) fail("sim policy needs at least one logit anchor");
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    const auto& a = anchors[i];
    if (a.logits.size() != max_count + 1) {
      fail("anchor " + std::to_string(i) + " has " + std::to_string(a.logits.size()) +
           " logits, expected " + std::to_string(max_count + 1));
    }
    if (std::any_of(a.logits.begin(), a.logits.end(), [](double v) { return std::isnan(v); })) {
      fail("anchor " + std::to_string(i) + " has a NaN logit");
    }
    if (!std::any_of(a.logits.begin(), a.logits.end(), [](double v) { return std::isfinite(v); })) {
      fail("anchor " + std::to_string(i) + " has no finite logit");
    }
    if (i > 0 && !(anchors[i - 1].difficulty < a.difficulty)) fail("anchors must be sorted by difficulty");
  }
  const auto& m = accuracy;
  for (double p : {m.easy_floor, m.hard_floor, m.easy_ceiling, m.hard_ceiling}) {
    if (!(p >= 0.0 && p <= 1.0)) fail("accuracy levels must lie in [0, 1]");
  }
  if (m.easy_floor > m.easy_ceiling || m.hard_floor > m.hard_ceiling) {
    fail("accuracy floor above ceiling makes accuracy decrease with block count");
  }
  // Non-increasing in difficulty for every k needs the ceiling to fall, the
  // gap to widen and the saturation scale to grow.
  if (m.hard_ceiling > m.easy_ceiling || m.hard_ceiling - m.hard_floor < m.easy_ceiling - m.easy_floor ||
      m.hard_saturation < m.easy_saturation) {
    fail("accuracy model must be non-increasing in difficulty");
  }
  if (!(m.easy_saturation > 0.0) || !(m.difficulty_max > m.difficulty_min)) {
    fail("invalid accuracy model scale");
  }
  if (!(block_length_mean >= 1.0) || !(block_length_spread >= 0.0 && block_length_spread < 1.0)) {
    fail("block length must have mean >= 1 and spread in [0, 1)");
  }
  if (!(mismatch_rate >= 0.0 && mismatch_rate <= 1.0)) fail("mismatch_rate must lie in [0, 1]");
}

SimPolicy::SimPolicy(SimPolicyConfig config) : config_(std::move(config)) { config_.validate(); }

decode::BlockCountDistribution SimPolicy::predict_block_logits(const ProblemRecord& prompt) const {
  const auto& a = config_.anchors;
  const double d = prompt.difficulty;
  if (d <= a.front().difficulty) return {a.front().logits};
  if (d >= a.back().difficulty) return {a.back().logits};
  auto hi = std::upper_bound(a.begin(), a.end(), d,
                             [](double v, const LogitAnchor& x) { return v < x.difficulty; });
  auto lo = hi - 1;
  if (d == lo->difficulty) return {lo->logits};
  const double t = (d - lo->difficulty) / (hi->difficulty - lo->difficulty);
  decode::BlockCountDistribution out;
  out.logits.resize(lo->logits.size());
  for (std::size_t k = 0; k < out.logits.size(); ++k) {
    const double x = lo->logits[k];
    const double y = hi->logits[k];
    // A count impossible at either end stays impossible in between.
    out.logits[k] = std::isinf(x) || std::isinf(y) ? -std::numeric_limits<double>::infinity() : lerp(x, y, t);
  }
  return out;
}

SampledResponse SimPolicy::generate_conditioned(const ProblemRecord& prompt, std::uint64_t k,
                                                Rng& session) const {
  Rng rng(session() ^ splitmix64(config_.seed));
  const bool correct = bernoulli(rng, base_accuracy(prompt.difficulty, k));
  const bool inject = config_.mismatch_rate > 0.0 && bernoulli(rng, config_.mismatch_rate);
  const std::uint64_t declared = inject ? k + 1 : k;

  const double m = config_.block_length_mean;
  const double s = config_.block_length_spread;
  const auto lo = static_cast<std::uint64_t>(std::max(1.0, std::round(m * (1.0 - s))));
  const auto hi = static_cast<std::uint64_t>(std::max(1.0, std::round(m * (1.0 + s))));

  std::string text;
  text.append(format::kThinkOpen).append(format::kCountOpen);
  text.append(std::to_string(declared)).append(format::kCountClose);
  for (std::uint64_t i = 0; i < k; ++i) {
    if (i > 0) text.append(format::kContinue);
    text.push_back('\n');
    append_words(text, uniform_int(rng, lo, hi), rng);
    text.push_back('\n');
  }
  text.append(format::kThinkClose).push_back('\n');
  const std::uint64_t answer_words = std::max<std::uint64_t>(config_.response_length_base, 1);
  append_words(text, answer_words - 1, rng);
  if (answer_words > 1) text.push_back(' ');
  const std::string answer =
      correct ? prompt.ground_truth : prompt.ground_truth + "-wrong" + std::to_string(uniform_int(rng, 1, 9));
  text.append("\\boxed{").append(answer).append("}");

  return make_response(prompt.id, text, correct);
}

std::unique_ptr<SimPolicy> make_sim_policy(SimPolicyConfig config) {
  return std::make_unique<SimPolicy>(std::move(config));
}

std::vector<ProblemRecord> default_problems(std::size_t count) {
  std::vector<ProblemRecord> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "sim-%05zu", i);
    ProblemRecord p;
    p.id = id;
    p.difficulty = 2.0 + 0.5 * static_cast<double>(i % 15);
    p.question = "synthetic problem " + std::to_string(i) + " at difficulty " + std::to_string(p.difficulty);
    p.ground_truth = std::to_string(i * 7 % 101);
    out.push_back(std::move(p));
  }
  return out;
}

SweepReport run_cap_sweep(const decode::PolicyInterface& policy,
                          const std::vector<ProblemRecord>& problems,
                          const std::vector<SweepCap>& caps, std::size_t n_per,
                          const SweepOptions& options) {
  metrics::DifficultyIndex index;
  for (const auto& p : problems) index[p.id] = p.difficulty;

  decode::DecodeOptions dopts;
  dopts.accept_violations = true;

  SweepReport report;
  for (const auto& sc : caps) {
    std::vector<SampledResponse> responses;
    responses.reserve(problems.size() * n_per);
    double blocks = 0.0;
    for (const auto& p : problems) {
      for (std::size_t j = 0; j < n_per; ++j) {
        Rng rng = derive_rng(options.seed, p.id, j);
        auto res = decode::decode(policy, p, sc.cap, rng, dopts);
        blocks += static_cast<double>(res.response.trace.actual_count());
        responses.push_back(std::move(res.response));
      }
    }
    SweepRow row;
    row.label = sc.label;
    row.cap = sc.cap;
    row.samples = responses.size();
    row.length = metrics::compute_length_stats(responses);
    row.bad_cases = metrics::bad_case_breakdown(responses);
    row.accuracy = metrics::accuracy_by_split(responses, index, options.easy, options.difficult);
    row.mean_block_count = responses.empty() ? 0.0 : blocks / static_cast<double>(responses.size());
    report.rows.push_back(std::move(row));
  }

  auto auto_row = std::find_if(report.rows.begin(), report.rows.end(),
                               [](const SweepRow& r) { return r.cap.mode == decode::CapMode::Auto; });
  report.reference_row = auto_row == report.rows.end() ? 0 : static_cast<std::size_t>(auto_row - report.rows.begin());
  if (!report.rows.empty()) {
    const auto& ref = report.rows[report.reference_row];
    for (auto& r : report.rows) {
      r.delta_accuracy = r.accuracy.overall - ref.accuracy.overall;
      r.delta_length = ref.length.mean > 0.0 ? (r.length.mean - ref.length.mean) / ref.length.mean : 0.0;
    }
  }
  return report;
}

std::string render_sweep_table(const SweepReport& report) {
  std::ostringstream os;
  char line[256];
  auto pct = [](std::optional<double> v) {
    char buf[16];
    if (v) std::snprintf(buf, sizeof buf, "%.1f%%", 100.0 * *v);
    else std::snprintf(buf, sizeof buf, "-");
    return std::string(buf);
  };
  std::snprintf(line, sizeof line, "%-10s | %8s %8s | %9s | %8s %8s %9s | %7s %7s\n", "Block Cap", "mean",
                "std", "Bad cases", "Overall", "Easy", "Difficult", "dAcc", "dLen");
  os << line;
  os << std::string(std::string_view(line).size() - 1, '-') << '\n';
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const auto& r = report.rows[i];
    std::string dacc = "--", dlen = "--";
    if (i != report.reference_row) {
      char b[32];
      std::snprintf(b, sizeof b, "%+.1f%%", 100.0 * r.delta_accuracy);
      dacc = b;
      std::snprintf(b, sizeof b, "%+.1f%%", 100.0 * r.delta_length);
      dlen = b;
    }
    std::snprintf(line, sizeof line, "%-10s | %8.0f %8.0f | %9s | %8s %8s %9s | %7s %7s\n", r.label.c_str(),
                  r.length.mean, r.length.std, pct(r.bad_cases.ratio()).c_str(),
                  pct(r.accuracy.overall).c_str(), pct(r.accuracy.easy).c_str(),
                  pct(r.accuracy.difficult).c_str(), dacc.c_str(), dlen.c_str());
    os << line;
  }
  return os.str();
}

}  // namespace blockcot::sim
