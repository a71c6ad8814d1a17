#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "blockcot/blockcap_decoder.hpp"
#include "oracles.hpp"

using blockcot::Error;
using blockcot::ErrorCode;
using blockcot::ProblemRecord;
using blockcot::Rng;
using blockcot::SampledResponse;
using namespace blockcot::decode;

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Fixed logits; optionally declares k + 1 for the first `faults` calls.
class FixedPolicy : public PolicyInterface {
 public:
  explicit FixedPolicy(std::vector<double> logits, int faults = 0) : logits_(std::move(logits)), faults_(faults) {}

  BlockCountDistribution predict_block_logits(const ProblemRecord&) const override { return {logits_}; }

  SampledResponse generate_conditioned(const ProblemRecord& p, std::uint64_t k, Rng&) const override {
    SampledResponse r;
    r.problem_id = p.id;
    r.trace.blocks.assign(k, "x");
    r.trace.declared_count = calls_++ < faults_ ? k + 1 : k;
    return r;
  }

  int calls() const { return calls_; }

 private:
  std::vector<double> logits_;
  int faults_;
  mutable int calls_ = 0;
};

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::MalformedRecord;
}

}  // namespace

TEST_CASE("mask_block_logits") {
  BlockCountDistribution d{{1, 2, 3}};
  auto m = mask_block_logits(d, CapSpec::range(1, 2));
  CHECK(m.logits[0] == kNegInf);
  CHECK(m.logits[1] == 2);
  CHECK(m.logits[2] == 3);
  CHECK(mask_block_logits(d, CapSpec::automatic()).logits == d.logits);
  CHECK(code_of([&] { mask_block_logits(BlockCountDistribution{{1, 2, 3, 4}}, CapSpec::range(5, 9)); }) ==
        ErrorCode::AllMasked);
  CHECK(code_of([&] { mask_block_logits(d, CapSpec::range(2, 1)); }) == ErrorCode::InvalidCap);
  CHECK(code_of([&] { mask_block_logits(BlockCountDistribution{{kNegInf, 0, 0}}, CapSpec::range(0, 0)); }) ==
        ErrorCode::AllMasked);
}

TEST_CASE("softmax and sampling") {
  auto p = softmax_probabilities({{std::log(3.0), 0.0}});
  CHECK(p[0] == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(p[1] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(softmax_probabilities({{1000.0, 1000.0}})[0] == doctest::Approx(0.5));
  CHECK(code_of([] { softmax_probabilities({{kNegInf, kNegInf}}); }) == ErrorCode::AllMasked);

  Rng rng(1);
  for (int i = 0; i < 1000; ++i) CHECK(sample_block_count({{0, kNegInf, kNegInf}}, rng) == 0);
  for (int i = 0; i < 1000; ++i) CHECK(sample_block_count({{kNegInf, kNegInf, 0}}, rng) == 2);

  int zeros = 0;
  for (int i = 0; i < 100000; ++i) zeros += sample_block_count({{0.0, 0.0}}, rng) == 0;
  CHECK(zeros / 100000.0 >= 0.494);
  CHECK(zeros / 100000.0 <= 0.506);
}

TEST_CASE("greedy_block_count") {
  CHECK(greedy_block_count({{0, 3, 3, 1}}) == 1);
  CHECK(greedy_block_count({{kNegInf, kNegInf, 0}}) == 2);
}

TEST_CASE("parse_cap and cap_label") {
  CHECK(parse_cap("auto", 16) == CapSpec::automatic());
  CHECK(parse_cap("0", 16) == CapSpec::range(0, 0));
  CHECK(parse_cap("6", 16) == CapSpec::range(0, 6));
  CHECK(parse_cap(">6", 16) == CapSpec::range(7, 16));
  CHECK(parse_cap("2-5", 16) == CapSpec::range(2, 5));
  CHECK(cap_label(CapSpec::range(0, 2), 16) == "<=2");
  CHECK(cap_label(CapSpec::range(7, 16), 16) == ">6");
  CHECK(cap_label(CapSpec::range(2, 5), 16) == "[2,5]");
  CHECK(cap_label(CapSpec::automatic(), 16) == "auto");
  for (auto bad : {"", "x", "-1", "5-2", ">16", "1-"}) {
    CHECK_MESSAGE(code_of([&] { parse_cap(bad, 16); }) == ErrorCode::InvalidCap, bad);
  }
}

TEST_CASE("decode") {
  ProblemRecord prompt{"q", "", 5.0, "1"};
  FixedPolicy policy({0, 0, 0, 0, 0});
  Rng rng(3);
  auto r = decode(policy, prompt, CapSpec::range(0, 0), rng);
  CHECK(r.k == 0);
  CHECK(r.response.trace.blocks.empty());
  CHECK_FALSE(r.policy_violation);

  for (int i = 0; i < 2000; ++i) {
    auto d = decode(policy, prompt, CapSpec::range(1, 3), rng);
    REQUIRE(d.k >= 1);
    REQUIRE(d.k <= 3);
    REQUIRE(d.response.trace.declared_count == d.k);
  }

  FixedPolicy peaked({0, 5, 1});
  DecodeOptions greedy;
  greedy.greedy = true;
  CHECK(decode(peaked, prompt, CapSpec::automatic(), rng, greedy).k == 1);
  CHECK(decode(peaked, prompt, CapSpec::range(2, 2), rng, greedy).k == 2);
}

TEST_CASE("decode policy violations") {
  ProblemRecord prompt{"q", "", 5.0, "1"};
  Rng rng(4);
  {
    FixedPolicy faulty({0, 0}, 1);
    CHECK(code_of([&] { decode(faulty, prompt, CapSpec::automatic(), rng); }) == ErrorCode::PolicyViolation);
  }
  {
    FixedPolicy faulty({0, 0}, 2);
    DecodeOptions opt;
    opt.retry_budget = 2;
    auto r = decode(faulty, prompt, CapSpec::automatic(), rng, opt);
    CHECK(r.attempts == 3);
    CHECK_FALSE(r.policy_violation);
  }
  {
    FixedPolicy faulty({0, 0}, 10);
    DecodeOptions opt;
    opt.accept_violations = true;
    auto r = decode(faulty, prompt, CapSpec::automatic(), rng, opt);
    CHECK(r.policy_violation);
    CHECK(r.response.trace.declared_count == r.k + 1);
  }
}

TEST_CASE("sampling is deterministic per seed and matches softmax") {
  BlockCountDistribution d{{0.3, -1.0, 2.0, 0.0, kNegInf, 1.0}};
  Rng a(99), b(99);
  for (int i = 0; i < 1000; ++i) REQUIRE(sample_block_count(d, a) == sample_block_count(d, b));

  const auto expect = oracle::softmax(d.logits);
  std::vector<double> freq(d.logits.size(), 0.0);
  const int n = 200000;
  for (int i = 0; i < n; ++i) freq[sample_block_count(d, a)] += 1.0 / n;
  CHECK(freq[4] == 0.0);
  for (std::size_t k = 0; k < freq.size(); ++k) CHECK(std::fabs(freq[k] - expect[k]) < 0.01);
}
