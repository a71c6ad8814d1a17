#include "blockcot/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "blockcot/blockcap_decoder.hpp"
#include "blockcot/corpus_segmenter.hpp"
#include "blockcot/dast_dpo.hpp"
#include "blockcot/metrics.hpp"
#include "blockcot/records_io.hpp"
#include "blockcot/rl_objective.hpp"
#include "blockcot/sim_policy.hpp"

namespace blockcot::cli {
namespace {

using io::Json;

// Usage problems detected after argument parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Streams {
  std::istream& in;
  std::ostream& out;
  std::ostream& err;
};

struct CommonOptions {
  std::string input = "-";
  std::string output = "-";
  bool lenient = false;
  std::string length_unit = "tokens";
  std::string config;

  format::ParseMode mode() const { return lenient ? format::ParseMode::Lenient : format::ParseMode::Strict; }
  format::LengthFn length_fn() const {
    return format::length_fn_for(length_unit == "chars" ? format::LengthUnit::Characters
                                                        : format::LengthUnit::WhitespaceTokens);
  }
};

// Tracks the worst outcome seen so far.
class Status {
 public:
  void invalid() { code_ = std::max(code_, kExitValidationFailure); }
  void malformed() { code_ = std::max(code_, kExitMalformedInput); }
  int code() const { return code_; }

 private:
  int code_ = kExitOk;
};

std::string dump(const Json& j) { return j.dump(-1, ' ', false, Json::error_handler_t::replace); }

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) {
    if (path != "-") {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw UsageError("cannot open output '" + path + "'");
    }
    os_ = file_ ? file_.get() : &fallback;
  }
  void line(const Json& j) { *os_ << dump(j) << '\n'; }
  std::ostream& stream() { return *os_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* os_;
};

class Input {
 public:
  Input(const std::string& path, std::istream& fallback) {
    if (path != "-") {
      file_ = std::make_unique<std::ifstream>(path, std::ios::binary);
      if (!*file_) throw UsageError("cannot open input '" + path + "'");
    }
    is_ = file_ ? file_.get() : &fallback;
  }
  std::istream& stream() { return *is_; }

 private:
  std::unique_ptr<std::ifstream> file_;
  std::istream* is_;
};

void report_line_error(Streams& s, Status& st, std::size_t line, const std::string& msg) {
  s.err << "line " << line << ": " << msg << '\n';
  st.malformed();
}

struct LoadedResponse {
  std::size_t line = 0;
  Json raw;
  SampledResponse response;
};

// Malformed lines are reported and skipped.
std::vector<LoadedResponse> load_responses(std::istream& in, const CommonOptions& opts, Streams& s,
                                           Status& st) {
  std::vector<LoadedResponse> out;
  const auto length_fn = opts.length_fn();
  io::read_jsonl(
      in,
      [&](std::size_t line, Json j) {
        try {
          auto r = io::response_from_json(j, length_fn, opts.mode());
          out.push_back({line, std::move(j), std::move(r)});
        } catch (const Error& e) {
          report_line_error(s, st, line, e.what());
        }
      },
      [&](const io::LineError& e) { report_line_error(s, st, e.line, e.message); });
  return out;
}

// Indices grouped by problem id, groups in order of first appearance.
std::vector<std::vector<std::size_t>> group_by_problem(const std::vector<LoadedResponse>& rs) {
  std::vector<std::vector<std::size_t>> groups;
  std::map<std::string, std::size_t> slot;
  for (std::size_t i = 0; i < rs.size(); ++i) {
    auto [it, fresh] = slot.emplace(rs[i].response.problem_id, groups.size());
    if (fresh) groups.emplace_back();
    groups[it->second].push_back(i);
  }
  return groups;
}

std::vector<SampledResponse> gather(const std::vector<LoadedResponse>& rs, const std::vector<std::size_t>& idx) {
  std::vector<SampledResponse> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(rs[i].response);
  return out;
}

rl::RewardConfig load_reward_config(const CommonOptions& opts) {
  if (opts.config.empty()) return {};
  return io::reward_config_from_json(io::load_json_file(opts.config));
}

sim::SimPolicyConfig load_sim_config(const std::string& path) {
  if (path.empty()) return sim::SimPolicyConfig::defaults();
  return io::sim_config_from_json(io::load_json_file(path));
}

void add_common(CLI::App* app, CommonOptions& o, bool with_config) {
  app->add_option("input", o.input, "Input JSON-Lines file ('-' for stdin)");
  app->add_option("-o,--output", o.output, "Output file ('-' for stdout)");
  app->add_flag("--lenient", o.lenient, "Tolerate whitespace around tags");
  app->add_option("--length-unit", o.length_unit, "Length unit for responses")
      ->check(CLI::IsMember({"tokens", "chars"}));
  if (with_config) app->add_option("--config", o.config, "Reward config JSON file");
}

// ---------------------------------------------------------------------------

int cmd_parse(const CommonOptions& o, Streams& s, bool validate) {
  Input in(o.input, s.in);
  Output out(o.output, s.out);
  Status st;
  io::read_jsonl(
      in.stream(),
      [&](std::size_t line, Json j) {
        auto it = j.find("text");
        if (it == j.end() || !it->is_string()) {
          report_line_error(s, st, line, "record needs a string field 'text'");
          return;
        }
        const auto trace = format::parse_trace(it->get<std::string>(), o.mode());
        if (validate) {
          const auto report = format::validate_consistency(trace);
          if (!report.is_consistent) st.invalid();
          j["consistency"] = io::to_json(report);
        } else {
          j["trace"] = io::to_json(trace);
        }
        out.line(j);
      },
      [&](const io::LineError& e) { report_line_error(s, st, e.line, e.message); });
  return st.code();
}

int cmd_dast_score(const CommonOptions& o, Streams& s) {
  Input in(o.input, s.in);
  Output out(o.output, s.out);
  Status st;
  auto rs = load_responses(in.stream(), o, s, st);
  std::vector<Json> annotations(rs.size());
  for (const auto& g : group_by_problem(rs)) {
    const auto group = gather(rs, g);
    const auto stats = dast::token_length_budget(group);
    for (std::size_t j = 0; j < g.size(); ++j) {
      Json a{{"index", j},
             {"length", group[j].length},
             {"p", stats.p},
             {"mean_length", stats.mean_length},
             {"max_length", stats.max_length},
             {"budget", stats.budget}};
      try {
        a["reward"] = dast::calibrated_reward(group[j], stats);
      } catch (const Error& e) {
        a["reward"] = nullptr;
        a["error"] = e.what();
        if (j == 0) s.err << e.what() << '\n';
        st.invalid();
      }
      annotations[g[j]] = std::move(a);
    }
  }
  for (std::size_t i = 0; i < rs.size(); ++i) {
    Json j = rs[i].raw;
    j["dast"] = std::move(annotations[i]);
    out.line(j);
  }
  return st.code();
}

int cmd_make_pairs(const CommonOptions& o, std::optional<double> delta_opt, Streams& s) {
  const auto cfg = load_reward_config(o);
  const double delta = delta_opt.value_or(cfg.pair_threshold);
  if (!(delta >= 0.0)) throw UsageError("--delta must be non-negative");
  Input in(o.input, s.in);
  Output out(o.output, s.out);
  Status st;
  auto rs = load_responses(in.stream(), o, s, st);
  for (const auto& g : group_by_problem(rs)) {
    const auto group = gather(rs, g);
    std::vector<dast::PreferencePair> pairs;
    try {
      pairs = dast::build_preference_pairs(group, delta);
    } catch (const Error& e) {
      s.err << "problem '" << group.front().problem_id << "': " << e.what() << '\n';
      st.invalid();
      continue;
    }
    for (const auto& p : pairs) {
      out.line(Json{{"problem_id", p.chosen.problem_id},
                    {"chosen_text", format::response_text(p.chosen.trace)},
                    {"rejected_text", format::response_text(p.rejected.trace)},
                    {"reward_chosen", p.reward_chosen},
                    {"reward_rejected", p.reward_rejected}});
    }
  }
  return st.code();
}

int cmd_advantage(const CommonOptions& o, const std::string& reference, const std::string& scale,
                  bool summary, Streams& s) {
  const auto cfg = load_reward_config(o);
  Status st;
  const auto length_fn = o.length_fn();

  std::map<std::string, std::vector<int>> ref_correct;
  if (!reference.empty()) {
    Input ref(reference, s.in);
    for (const auto& r : load_responses(ref.stream(), o, s, st)) {
      ref_correct[r.response.problem_id].push_back(r.response.correct ? 1 : 0);
    }
  }

  Input in(o.input, s.in);
  Output out(o.output, s.out);
  auto rs = load_responses(in.stream(), o, s, st);

  const auto mode = scale == "batch" ? rl::ScaleMode::Batch
                    : scale == "none" ? rl::ScaleMode::None
                                      : rl::ScaleMode::PerGroup;
  std::optional<double> batch_accuracy;
  if (!rs.empty()) {
    std::size_t hits = 0;
    for (const auto& r : rs) hits += r.response.correct;
    batch_accuracy = static_cast<double>(hits) / static_cast<double>(rs.size());
  }

  std::vector<Json> annotations(rs.size());
  std::vector<double> totals(rs.size(), 0.0);
  std::vector<rl::RolloutSample> batch;
  for (const auto& g : group_by_problem(rs)) {
    const auto group = gather(rs, g);
    std::vector<int> own;
    for (const auto& r : group) own.push_back(r.correct ? 1 : 0);
    const auto& pid = group.front().problem_id;
    std::span<const int> ref = own;
    if (!reference.empty()) {
      auto it = ref_correct.find(pid);
      if (it == ref_correct.end()) {
        s.err << "no reference samples for problem '" << pid << "'\n";
        st.malformed();
        continue;
      }
      ref = it->second;
    }
    const auto ga = rl::group_advantage(group, ref, cfg, mode, batch_accuracy, length_fn);
    for (std::size_t j = 0; j < g.size(); ++j) {
      annotations[g[j]] = Json{{"r_ref", ga.r_ref},
                               {"accuracy", ga.accuracy},
                               {"h", ga.h},
                               {"lambdas", io::to_json(ga.lambdas)},
                               {"breakdown", io::to_json(ga.per_sample[j])}};
      totals[g[j]] = ga.per_sample[j].total;
      batch.push_back({&rs[g[j]].response, ga.r_ref});
    }
  }
  for (std::size_t i = 0; i < rs.size(); ++i) {
    if (annotations[i].is_null()) continue;
    Json j = rs[i].raw;
    j["advantage"] = std::move(annotations[i]);
    out.line(j);
  }
  if (summary && !batch.empty()) {
    const double h = mode == rl::ScaleMode::None ? 1.0 : rl::accuracy_scale(*batch_accuracy, cfg);
    const auto lambdas = rl::scaled_multipliers(cfg, h);
    auto sum = io::to_json(rl::rollout_objective(batch, lambdas, cfg, length_fn));
    sum["h"] = h;
    sum["lambdas"] = io::to_json(lambdas);
    sum["batch_accuracy"] = *batch_accuracy;
    sum["mean_advantage"] = rl::pairwise_sum(totals) / static_cast<double>(totals.size());
    out.line(Json{{"summary", sum}});
  }
  return st.code();
}

int cmd_ppo_loss(const CommonOptions& o, std::optional<double> clip_low, std::optional<double> clip_high,
                 Streams& s) {
  auto cfg = load_reward_config(o);
  if (clip_low) cfg.eps_low = *clip_low;
  if (clip_high) cfg.eps_high = *clip_high;
  if (!(cfg.eps_low > 0.0) || !(cfg.eps_high > 0.0)) throw UsageError("clip ratios must be positive");
  Input in(o.input, s.in);
  Output out(o.output, s.out);
  Status st;
  io::read_jsonl(
      in.stream(),
      [&](std::size_t line, Json j) {
        auto num = [&](const char* key) -> std::optional<double> {
          auto it = j.find(key);
          if (it == j.end() || !it->is_number()) return std::nullopt;
          return it->get<double>();
        };
        auto lp_new = num("logp_new");
        auto lp_old = num("logp_old");
        auto adv = num("advantage");
        if (!lp_new || !lp_old || !adv) {
          report_line_error(s, st, line, "record needs numeric 'logp_new', 'logp_old' and 'advantage'");
          return;
        }
        try {
          j["surrogate"] = rl::ppo_surrogate(*lp_new, *lp_old, *adv, cfg);
          j["ratio"] = std::exp(*lp_new - *lp_old);
        } catch (const Error& e) {
          j["surrogate"] = nullptr;
          j["error"] = e.what();
          st.invalid();
        }
        out.line(j);
      },
      [&](const io::LineError& e) { report_line_error(s, st, e.line, e.message); });
  return st.code();
}

struct SimOptions {
  std::string sim_config;
  std::string problems;
  std::size_t num_problems = 0;
  std::uint64_t seed = 0;
  std::size_t samples = 0;
};

std::vector<ProblemRecord> sim_problems(const SimOptions& so) {
  if (!so.problems.empty()) return io::read_problems_file(so.problems);
  return sim::default_problems(so.num_problems);
}

int cmd_decode_sim(const CommonOptions& o, const SimOptions& so, const std::string& mode,
                   std::optional<std::uint64_t> cap_low, std::optional<std::uint64_t> cap_high, bool greedy,
                   unsigned retries, Streams& s) {
  const auto policy = sim::make_sim_policy(load_sim_config(so.sim_config));
  const auto max_count = policy->config().max_count;
  decode::CapSpec cap;
  if (mode == "override") {
    cap = decode::CapSpec::range(cap_low.value_or(0), cap_high.value_or(max_count));
    if (cap.cap_low > cap.cap_high) throw UsageError("--cap-low exceeds --cap-high");
    if (cap.cap_low > max_count) {
      throw UsageError("cap range admits no block count in 0.." + std::to_string(max_count));
    }
  } else if (cap_low || cap_high) {
    throw UsageError("--cap-low/--cap-high need --mode override");
  }
  const auto problems = sim_problems(so);
  Output out(o.output, s.out);
  Status st;
  decode::DecodeOptions dopts;
  dopts.greedy = greedy;
  dopts.retry_budget = retries;
  for (const auto& p : problems) {
    for (std::size_t j = 0; j < so.samples; ++j) {
      Rng rng = derive_rng(so.seed, p.id, j);
      Json line;
      try {
        auto res = decode::decode(*policy, p, cap, rng, dopts);
        line = io::to_json(res.response);
        line["k"] = res.k;
        line["attempts"] = res.attempts;
      } catch (const Error& e) {
        line = Json{{"problem_id", p.id}, {"error", e.what()}};
        st.invalid();
      }
      line["sample"] = j;
      line["difficulty"] = p.difficulty;
      out.line(line);
    }
  }
  return st.code();
}

int cmd_cap_sweep(const CommonOptions& o, const SimOptions& so, const std::string& caps_arg,
                  const std::string& fmt, Streams& s) {
  const auto policy = sim::make_sim_policy(load_sim_config(so.sim_config));
  const auto max_count = policy->config().max_count;
  std::vector<sim::SweepCap> caps;
  std::stringstream ss(caps_arg);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    auto cap = decode::parse_cap(tok, max_count);
    if (cap.mode == decode::CapMode::Override && cap.cap_low > max_count) {
      throw UsageError("cap '" + tok + "' admits no block count in 0.." + std::to_string(max_count));
    }
    caps.push_back({decode::cap_label(cap, max_count), cap});
  }
  if (caps.empty()) throw UsageError("--caps is empty");
  const auto problems = sim_problems(so);
  sim::SweepOptions sopts;
  sopts.seed = so.seed;
  const auto report = sim::run_cap_sweep(*policy, problems, caps, so.samples, sopts);
  Output out(o.output, s.out);
  if (fmt == "table") {
    out.stream() << sim::render_sweep_table(report);
  } else {
    for (const auto& row : report.rows) out.line(io::to_json(row, max_count));
  }
  return kExitOk;
}

int cmd_segment_check(const CommonOptions& o, Streams& s) {
  Input in(o.input, s.in);
  Output out(o.output, s.out);
  Status st;
  io::read_jsonl(
      in.stream(),
      [&](std::size_t line, Json j) {
        auto str = [&](const char* key) -> std::optional<std::string> {
          auto it = j.find(key);
          if (it == j.end() || !it->is_string()) return std::nullopt;
          return it->get<std::string>();
        };
        auto original = str("original");
        auto segmented = str("segmented");
        auto d = j.find("difficulty");
        if (!original || !segmented || d == j.end() || !d->is_number()) {
          report_line_error(s, st, line, "record needs 'difficulty', 'original' and 'segmented'");
          return;
        }
        const auto report = segment::validate_segmentation(*original, *segmented, d->get<double>());
        if (!report.valid()) st.invalid();
        Json r{{"id", j.contains("id") ? j["id"] : Json(nullptr)}};
        r.update(io::to_json(report));
        out.line(r);
      },
      [&](const io::LineError& e) { report_line_error(s, st, e.line, e.message); });
  return st.code();
}

metrics::DifficultyRange parse_range(const std::string& text) {
  auto comma = text.find(',');
  if (comma == std::string::npos) throw UsageError("difficulty range must be 'lo,hi'");
  try {
    std::size_t used = 0;
    metrics::DifficultyRange r{std::stod(text.substr(0, comma), &used), 0.0};
    r.hi = std::stod(text.substr(comma + 1));
    if (r.lo > r.hi) throw UsageError("difficulty range has lo > hi");
    return r;
  } catch (const std::logic_error&) {
    throw UsageError("cannot parse difficulty range '" + text + "'");
  }
}

int cmd_stats(const CommonOptions& o, const std::string& problems_path, const std::string& easy,
              const std::string& difficult, const std::string& fmt, Streams& s) {
  Status st;
  metrics::DifficultyIndex index;
  if (!problems_path.empty()) {
    for (const auto& p : io::read_problems_file(problems_path)) index[p.id] = p.difficulty;
  }
  Input in(o.input, s.in);
  auto rs = load_responses(in.stream(), o, s, st);
  for (const auto& r : rs) {
    if (auto it = r.raw.find("difficulty"); it != r.raw.end() && it->is_number()) {
      index.emplace(r.response.problem_id, it->get<double>());
    }
  }
  std::vector<SampledResponse> responses;
  responses.reserve(rs.size());
  for (auto& r : rs) responses.push_back(std::move(r.response));
  const auto report = metrics::evaluate(responses, index, parse_range(easy), parse_range(difficult));
  if (report.length.no_correct_responses) s.err << "warning: no correct responses; length stats are 0\n";
  Output out(o.output, s.out);
  if (fmt == "table") {
    sim::SweepReport rep;
    sim::SweepRow row;
    row.label = "input";
    row.samples = responses.size();
    row.length = report.length;
    row.bad_cases = report.bad_cases;
    row.accuracy = report.accuracy;
    rep.rows.push_back(row);
    out.stream() << sim::render_sweep_table(rep);
    out.stream() << "block histogram (0 = no-think):";
    for (auto [k, n] : report.histogram) out.stream() << ' ' << k << ':' << n;
    out.stream() << '\n';
  } else {
    out.line(io::to_json(report));
  }
  return st.code();
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  Streams s{in, out, err};
  CLI::App app{"Block-structured chain-of-thought tooling", "blockcot"};
  app.require_subcommand(1);

  CommonOptions common;
  std::optional<double> delta;
  std::string reference, scale = "group";
  bool summary = false;
  std::optional<double> clip_low, clip_high;
  SimOptions decode_opts;
  decode_opts.num_problems = 15;
  decode_opts.samples = 1;
  SimOptions sweep_opts;
  sweep_opts.num_problems = 500;
  sweep_opts.samples = 4;
  std::string mode = "auto";
  std::optional<std::uint64_t> cap_low, cap_high;
  bool greedy = false;
  unsigned retries = 0;
  std::string caps = "auto,0,2,6,>6";
  std::string fmt = "jsonl";
  std::string problems_path, easy = "2.0,4.5", difficult = "8.0,9.0";

  auto* parse = app.add_subcommand("parse", "Parse response texts into block traces");
  add_common(parse, common, false);
  auto* validate = app.add_subcommand("validate", "Check declared vs actual block counts");
  add_common(validate, common, false);

  auto* dast_score = app.add_subcommand("dast-score", "Budget-calibrated reward per response");
  add_common(dast_score, common, false);

  auto* make_pairs = app.add_subcommand("make-pairs", "Build chosen/rejected preference pairs");
  add_common(make_pairs, common, true);
  make_pairs->add_option("--delta", delta, "Reward-gap threshold (default 0.3)");

  auto* adv = app.add_subcommand("advantage", "Per-sample advantage breakdown");
  add_common(adv, common, true);
  adv->add_option("--reference", reference, "Reference-policy responses for the baseline reward");
  adv->add_option("--scale", scale, "Accuracy-aware multiplier scaling")
      ->check(CLI::IsMember({"group", "batch", "none"}));
  adv->add_flag("--summary", summary, "Append the batch Lagrangian summary line");

  auto* ppo = app.add_subcommand("ppo-loss", "Clipped surrogate per (logp_new, logp_old, advantage)");
  add_common(ppo, common, true);
  ppo->add_option("--clip-low", clip_low, "Lower clip ratio");
  ppo->add_option("--clip-high", clip_high, "Upper clip ratio");

  auto add_sim = [&](CLI::App* sub, SimOptions& so) {
    sub->add_option("-o,--output", common.output, "Output file ('-' for stdout)");
    sub->add_option("--seed", so.seed, "Random seed")->envname("BLOCKCOT_SEED");
    sub->add_option("--samples", so.samples, "Samples per problem");
    sub->add_option("--sim-config", so.sim_config, "Simulated policy config JSON");
    sub->add_option("--problems", so.problems, "Problem records (JSON-Lines)");
    sub->add_option("--num-problems", so.num_problems, "Number of generated problems");
  };

  auto* decode_sim = app.add_subcommand("decode-sim", "Block-cap decoding against the simulated policy");
  add_sim(decode_sim, decode_opts);
  decode_sim->add_option("--mode", mode, "Decoding mode")->check(CLI::IsMember({"auto", "override"}));
  decode_sim->add_option("--cap-low", cap_low, "Lowest admissible block count");
  decode_sim->add_option("--cap-high", cap_high, "Highest admissible block count");
  decode_sim->add_flag("--greedy", greedy, "Take the highest-scoring block count instead of sampling");
  decode_sim->add_option("--retries", retries, "Regenerations allowed after a policy violation");

  auto* sweep = app.add_subcommand("cap-sweep", "Accuracy/length across block caps");
  add_sim(sweep, sweep_opts);
  sweep->add_option("--caps", caps, "Comma list: auto, N (<=N), >N, A-B");
  sweep->add_option("--format", fmt, "Output format")->check(CLI::IsMember({"jsonl", "table"}));

  auto* seg = app.add_subcommand("segment-check", "Validate segmentations of reasoning traces");
  add_common(seg, common, false);

  auto* stats = app.add_subcommand("stats", "Evaluation report over responses");
  add_common(stats, common, false);
  stats->add_option("--problems", problems_path, "Problem records with difficulties");
  stats->add_option("--easy", easy, "Easy difficulty band 'lo,hi'");
  stats->add_option("--difficult", difficult, "Difficult difficulty band 'lo,hi'");
  stats->add_option("--format", fmt, "Output format")->check(CLI::IsMember({"jsonl", "table"}));

  // CLI11 consumes arguments from the back.
  std::vector<std::string> reversed(args.rbegin(), args.rend());

  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "blockcot: " << e.what() << '\n';
    return kExitMalformedInput;
  }

  try {
    if (parse->parsed()) return cmd_parse(common, s, false);
    if (validate->parsed()) return cmd_parse(common, s, true);
    if (dast_score->parsed()) return cmd_dast_score(common, s);
    if (make_pairs->parsed()) return cmd_make_pairs(common, delta, s);
    if (adv->parsed()) return cmd_advantage(common, reference, scale, summary, s);
    if (ppo->parsed()) return cmd_ppo_loss(common, clip_low, clip_high, s);
    if (decode_sim->parsed()) return cmd_decode_sim(common, decode_opts, mode, cap_low, cap_high, greedy, retries, s);
    if (sweep->parsed()) return cmd_cap_sweep(common, sweep_opts, caps, fmt, s);
    if (seg->parsed()) return cmd_segment_check(common, s);
    if (stats->parsed()) return cmd_stats(common, problems_path, easy, difficult, fmt, s);
  } catch (const UsageError& e) {
    err << "blockcot: " << e.what() << '\n';
    return kExitMalformedInput;
  } catch (const Error& e) {
    err << "blockcot: " << e.what() << '\n';
    return kExitMalformedInput;
  }
  return kExitMalformedInput;
}

}  // namespace blockcot::cli
