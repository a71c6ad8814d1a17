#include "blockcot/records_io.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <set>

namespace blockcot::io {
namespace {

[[noreturn]] void malformed(const std::string& msg) { throw Error(ErrorCode::MalformedRecord, msg); }

const Json& require(const Json& j, const char* key) {
  if (!j.is_object()) malformed("record is not a JSON object");
  auto it = j.find(key);
  if (it == j.end()) malformed(std::string("missing field '") + key + "'");
  return *it;
}

std::string get_string(const Json& j, const char* key) {
  const auto& v = require(j, key);
  if (!v.is_string()) malformed(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

double get_number(const Json& v, const char* key) {
  if (!v.is_number()) malformed(std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

bool get_bool(const Json& v, const char* key) {
  // 0/1 integers are accepted as correctness indicators.
  if (v.is_boolean()) return v.get<bool>();
  if (v.is_number_integer() && (v.get<long long>() == 0 || v.get<long long>() == 1)) {
    return v.get<long long>() == 1;
  }
  malformed(std::string("field '") + key + "' must be a boolean");
}

Json number_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

Json optional_number(std::optional<double> v) {
  if (v) return *v;
  return nullptr;
}

}  // namespace

ProblemRecord problem_from_json(const Json& j) {
  ProblemRecord p;
  p.id = get_string(j, "id");
  p.question = j.contains("question") ? get_string(j, "question") : std::string();
  p.difficulty = get_number(require(j, "difficulty"), "difficulty");
  p.ground_truth = j.contains("ground_truth") ? get_string(j, "ground_truth") : std::string();
  return p;
}

Json to_json(const ProblemRecord& p) {
  return Json{{"id", p.id}, {"question", p.question}, {"difficulty", p.difficulty},
              {"ground_truth", p.ground_truth}};
}

SampledResponse response_from_json(const Json& j, const format::LengthFn& length_fn,
                                   format::ParseMode mode) {
  const auto text = get_string(j, "text");
  auto r = make_response(get_string(j, "problem_id"), text, get_bool(require(j, "correct"), "correct"),
                         length_fn, mode);
  if (auto it = j.find("length"); it != j.end() && !it->is_null()) {
    if (!it->is_number_unsigned() && !(it->is_number_integer() && it->get<long long>() >= 0)) {
      malformed("field 'length' must be a non-negative integer");
    }
    r.length = it->get<std::uint64_t>();
  }
  if (auto it = j.find("truncated"); it != j.end() && !it->is_null()) r.truncated = get_bool(*it, "truncated");
  if (auto it = j.find("logprob_policy"); it != j.end() && !it->is_null()) {
    r.logprob_policy = get_number(*it, "logprob_policy");
  }
  if (auto it = j.find("logprob_ref"); it != j.end() && !it->is_null()) {
    r.logprob_ref = get_number(*it, "logprob_ref");
  }
  return r;
}

Json to_json(const SampledResponse& r) {
  Json j{{"problem_id", r.problem_id},
         {"text", format::response_text(r.trace)},
         {"correct", r.correct},
         {"length", r.length}};
  if (r.truncated) j["truncated"] = true;
  if (r.logprob_policy) j["logprob_policy"] = *r.logprob_policy;
  if (r.logprob_ref) j["logprob_ref"] = *r.logprob_ref;
  return j;
}

Json to_json(const format::ReasoningTrace& t) {
  Json diags = Json::array();
  for (const auto& d : t.diagnostics) {
    diags.push_back({{"code", std::string(to_string(d.code))}, {"offset", d.offset}, {"message", d.message}});
  }
  return Json{{"declared_count", t.declared_count},
              {"actual_count", t.actual_count()},
              {"blocks", t.blocks},
              {"final_response", t.final_response},
              {"diagnostics", diags}};
}

Json to_json(const format::ConsistencyReport& c) {
  Json errs = Json::array();
  for (const auto& d : c.parse_errors) {
    errs.push_back({{"code", std::string(to_string(d.code))}, {"offset", d.offset}, {"message", d.message}});
  }
  return Json{{"declared", c.declared},
              {"actual", c.actual},
              {"mismatch", c.mismatch},
              {"is_consistent", c.is_consistent},
              {"parse_errors", errs}};
}

Json to_json(const rl::AdvantageBreakdown& a) {
  return Json{{"task_delta", a.task_delta},       {"nothink_bonus", a.nothink_bonus},
              {"count_penalty", a.count_penalty}, {"block_len_penalty", a.block_len_penalty},
              {"format_penalty", a.format_penalty}, {"total", a.total}};
}

Json to_json(const rl::Multipliers& m) {
  return Json{{"nothink_bonus_coef", m.nothink_bonus},
              {"count_coef", m.count},
              {"block_len_coef", m.block_len},
              {"seg_count_coef", m.seg_count}};
}

Json to_json(const rl::RolloutSummary& s) {
  return Json{{"samples", s.samples},
              {"task_delta", s.task_delta},
              {"nothink_fraction", s.nothink_fraction},
              {"mean_count", s.mean_count},
              {"mean_block_length", s.mean_block_length},
              {"mean_mismatch", s.mean_mismatch},
              {"total", s.total}};
}

Json to_json(const segment::SegmentationReport& r) {
  Json v = Json::array();
  for (const auto& x : r.violations) {
    v.push_back({{"kind", std::string(segment::to_string(x.kind))}, {"message", x.message}});
  }
  return Json{{"valid", r.valid()},
              {"separator_count", r.separator_count},
              {"min_required", r.min_required},
              {"max_allowed", r.max_allowed},
              {"content_preserved", r.content_preserved},
              {"violations", v}};
}

Json to_json(const metrics::EvalReport& e) {
  Json hist = Json::object();
  for (auto [k, n] : e.histogram) hist[std::to_string(k)] = n;
  return Json{
      {"responses", e.bad_cases.total},
      {"mean_length_correct", e.length.mean},
      {"std_length_correct", e.length.std},
      {"correct_count", e.length.count},
      {"no_correct_responses", e.length.no_correct_responses},
      {"std_convention", "population"},
      {"bad_case_ratio", e.bad_cases.ratio()},
      {"bad_cases",
       {{"total", e.bad_cases.bad},
        {"parse_failures", e.bad_cases.parse_failures},
        {"mismatches", e.bad_cases.mismatches},
        {"truncations", e.bad_cases.truncations}}},
      {"accuracy_overall", e.accuracy.overall},
      {"accuracy_overall_excluding_bad", optional_number(e.accuracy.overall_excluding_bad)},
      {"accuracy_easy", optional_number(e.accuracy.easy)},
      {"accuracy_difficult", optional_number(e.accuracy.difficult)},
      {"n_easy", e.accuracy.n_easy},
      {"n_difficult", e.accuracy.n_difficult},
      {"block_histogram", hist},
  };
}

Json to_json(const sim::SweepRow& row, std::uint64_t max_count) {
  return Json{{"cap", row.label},
              {"cap_low", row.cap.mode == decode::CapMode::Auto ? Json(nullptr) : Json(row.cap.cap_low)},
              {"cap_high", row.cap.mode == decode::CapMode::Auto ? Json(nullptr) : Json(row.cap.cap_high)},
              {"mode", row.cap.mode == decode::CapMode::Auto ? "auto" : "override"},
              {"normalized_cap", decode::cap_label(row.cap, max_count)},
              {"samples", row.samples},
              {"mean_length", row.length.mean},
              {"std_length", row.length.std},
              {"bad_case_ratio", row.bad_cases.ratio()},
              {"accuracy_overall", row.accuracy.overall},
              {"accuracy_easy", optional_number(row.accuracy.easy)},
              {"accuracy_difficult", optional_number(row.accuracy.difficult)},
              {"mean_block_count", row.mean_block_count},
              {"delta_accuracy", row.delta_accuracy},
              {"delta_length", row.delta_length}};
}

rl::RewardConfig reward_config_from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "reward config must be a JSON object");
  rl::RewardConfig c;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const auto& key = it.key();
    if (!it->is_number()) throw Error(ErrorCode::InvalidConfig, "config key '" + key + "' must be a number");
    const double v = it->get<double>();
    if (key == "nothink_bonus_coef") c.lambda_star.nothink_bonus = v;
    else if (key == "count_coef") c.lambda_star.count = v;
    else if (key == "block_len_coef") c.lambda_star.block_len = v;
    else if (key == "seg_count_coef") c.lambda_star.seg_count = v;
    else if (key == "accuracy_threshold_low") c.p_low = v;
    else if (key == "accuracy_threshold_high") c.p_high = v;
    else if (key == "clip_ratio_low") c.eps_low = v;
    else if (key == "clip_ratio_high") c.eps_high = v;
    else if (key == "block_len_normalizer") c.block_len_normalizer = v;
    else if (key == "pair_threshold") c.pair_threshold = v;
    else if (key == "dpo_beta") c.dpo_beta = v;
    else throw Error(ErrorCode::InvalidConfig, "unknown reward config key '" + key + "'");
  }
  c.validate();
  return c;
}

Json to_json(const rl::RewardConfig& c) {
  return Json{{"nothink_bonus_coef", c.lambda_star.nothink_bonus},
              {"count_coef", c.lambda_star.count},
              {"block_len_coef", c.lambda_star.block_len},
              {"seg_count_coef", c.lambda_star.seg_count},
              {"accuracy_threshold_low", c.p_low},
              {"accuracy_threshold_high", c.p_high},
              {"clip_ratio_low", c.eps_low},
              {"clip_ratio_high", c.eps_high},
              {"block_len_normalizer", c.block_len_normalizer},
              {"pair_threshold", c.pair_threshold},
              {"dpo_beta", c.dpo_beta}};
}

sim::SimPolicyConfig sim_config_from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "sim config must be a JSON object");
  auto c = sim::SimPolicyConfig::defaults();
  auto num = [&](const char* key, double& dst) {
    if (auto it = j.find(key); it != j.end()) {
      if (!it->is_number()) throw Error(ErrorCode::InvalidConfig, std::string("'") + key + "' must be a number");
      dst = it->get<double>();
    }
  };
  auto uint = [&](const Json& obj, const char* key, std::uint64_t& dst) {
    if (auto it = obj.find(key); it != obj.end()) {
      if (!it->is_number_unsigned()) {
        throw Error(ErrorCode::InvalidConfig, std::string("'") + key + "' must be a non-negative integer");
      }
      dst = it->get<std::uint64_t>();
    }
  };
  static const std::set<std::string> known = {"max_count",           "anchors",
                                              "accuracy",            "block_length_mean",
                                              "block_length_spread", "response_length_base",
                                              "mismatch_rate",       "seed"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!known.count(it.key())) throw Error(ErrorCode::InvalidConfig, "unknown sim config key '" + it.key() + "'");
  }
  const auto old_max = c.max_count;
  uint(j, "max_count", c.max_count);
  num("block_length_mean", c.block_length_mean);
  num("block_length_spread", c.block_length_spread);
  uint(j, "response_length_base", c.response_length_base);
  num("mismatch_rate", c.mismatch_rate);
  uint(j, "seed", c.seed);

  if (auto it = j.find("anchors"); it != j.end()) {
    if (!it->is_array()) throw Error(ErrorCode::InvalidConfig, "'anchors' must be an array");
    c.anchors.clear();
    for (const auto& a : *it) {
      sim::LogitAnchor anchor;
      if (!a.is_object() || !a.contains("difficulty") || !a["difficulty"].is_number()) {
        throw Error(ErrorCode::InvalidConfig, "each anchor needs a numeric 'difficulty'");
      }
      anchor.difficulty = a["difficulty"].get<double>();
      if (a.contains("logits")) {
        if (!a["logits"].is_array()) throw Error(ErrorCode::InvalidConfig, "'logits' must be an array");
        for (const auto& v : a["logits"]) {
          if (v.is_null()) anchor.logits.push_back(-std::numeric_limits<double>::infinity());
          else if (v.is_number()) anchor.logits.push_back(v.get<double>());
          else throw Error(ErrorCode::InvalidConfig, "logits must be numbers or null");
        }
      } else if (a.contains("peak") && a["peak"].is_number()) {
        const double width = a.contains("width") && a["width"].is_number() ? a["width"].get<double>() : 1.0;
        if (!(width > 0.0)) throw Error(ErrorCode::InvalidConfig, "anchor width must be positive");
        anchor.logits = sim::peaked_logits(c.max_count, a["peak"].get<double>(), width);
      } else {
        throw Error(ErrorCode::InvalidConfig, "anchor needs 'logits' or 'peak'");
      }
      c.anchors.push_back(std::move(anchor));
    }
  } else if (c.max_count != old_max) {
    // Rebuild the default anchors at the new width.
    auto d = sim::SimPolicyConfig::defaults();
    c.anchors.clear();
    for (const auto& a : d.anchors) {
      std::size_t peak = 0;
      for (std::size_t k = 1; k < a.logits.size(); ++k) {
        if (a.logits[k] > a.logits[peak]) peak = k;
      }
      c.anchors.push_back({a.difficulty, sim::peaked_logits(c.max_count, static_cast<double>(peak), 1.0)});
    }
  }

  if (auto it = j.find("accuracy"); it != j.end()) {
    if (!it->is_object()) throw Error(ErrorCode::InvalidConfig, "'accuracy' must be an object");
    auto& m = c.accuracy;
    const std::pair<const char*, double*> fields[] = {
        {"difficulty_min", &m.difficulty_min}, {"difficulty_max", &m.difficulty_max},
        {"easy_floor", &m.easy_floor},         {"hard_floor", &m.hard_floor},
        {"easy_ceiling", &m.easy_ceiling},     {"hard_ceiling", &m.hard_ceiling},
        {"easy_saturation", &m.easy_saturation}, {"hard_saturation", &m.hard_saturation}};
    for (auto f = it->begin(); f != it->end(); ++f) {
      bool found = false;
      for (auto [name, dst] : fields) {
        if (f.key() == name) {
          if (!f->is_number()) throw Error(ErrorCode::InvalidConfig, "'" + f.key() + "' must be a number");
          *dst = f->get<double>();
          found = true;
        }
      }
      if (!found) throw Error(ErrorCode::InvalidConfig, "unknown accuracy key '" + f.key() + "'");
    }
  }
  c.validate();
  return c;
}

Json to_json(const sim::SimPolicyConfig& c) {
  Json anchors = Json::array();
  for (const auto& a : c.anchors) {
    Json logits = Json::array();
    for (double v : a.logits) logits.push_back(number_or_null(v));
    anchors.push_back({{"difficulty", a.difficulty}, {"logits", logits}});
  }
  const auto& m = c.accuracy;
  return Json{{"max_count", c.max_count},
              {"anchors", anchors},
              {"accuracy",
               {{"difficulty_min", m.difficulty_min},
                {"difficulty_max", m.difficulty_max},
                {"easy_floor", m.easy_floor},
                {"hard_floor", m.hard_floor},
                {"easy_ceiling", m.easy_ceiling},
                {"hard_ceiling", m.hard_ceiling},
                {"easy_saturation", m.easy_saturation},
                {"hard_saturation", m.hard_saturation}}},
              {"block_length_mean", c.block_length_mean},
              {"block_length_spread", c.block_length_spread},
              {"response_length_base", c.response_length_base},
              {"mismatch_rate", c.mismatch_rate},
              {"seed", c.seed}};
}

Json load_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::InvalidConfig, "cannot open '" + path + "'");
  try {
    return Json::parse(f);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, "'" + path + "' is not valid JSON: " + e.what());
  }
}

void read_jsonl(std::istream& in, const std::function<void(std::size_t, Json)>& on_record,
                const std::function<void(const LineError&)>& on_error) {
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    Json j = Json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      on_error({n, "line is not valid JSON"});
    } else if (!j.is_object()) {
      on_error({n, "line is not a JSON object"});
    } else {
      on_record(n, std::move(j));
    }
  }
}

std::vector<ProblemRecord> read_problems(std::istream& in) {
  std::vector<ProblemRecord> out;
  std::set<std::string> seen;
  read_jsonl(
      in,
      [&](std::size_t line, Json j) {
        try {
          auto p = problem_from_json(j);
          if (!seen.insert(p.id).second) malformed("duplicate problem id '" + p.id + "'");
          out.push_back(std::move(p));
        } catch (const Error& e) {
          malformed("problem line " + std::to_string(line) + ": " + e.what());
        }
      },
      [](const LineError& e) { malformed("problem line " + std::to_string(e.line) + ": " + e.message); });
  return out;
}

std::vector<ProblemRecord> read_problems_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) malformed("cannot open problems file '" + path + "'");
  return read_problems(f);
}

}  // namespace blockcot::io
