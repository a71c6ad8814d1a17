#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "blockcot/sim_policy.hpp"

using namespace blockcot;
using namespace blockcot::sim;

namespace {

ProblemRecord problem(double d, std::string id = "p") { return {std::move(id), "q", d, "17"}; }

}  // namespace

TEST_CASE("default config validates and has expected modes") {
  auto cfg = SimPolicyConfig::defaults();
  CHECK_NOTHROW(cfg.validate());
  auto policy = make_sim_policy(cfg);
  CHECK(decode::greedy_block_count(policy->predict_block_logits(problem(2.0))) == 0);
  CHECK(decode::greedy_block_count(policy->predict_block_logits(problem(9.0))) == 8);
  CHECK(decode::greedy_block_count(policy->predict_block_logits(problem(4.5))) == 2);

  // Sampled mode at difficulty 2.0 is 0.
  Rng rng(5);
  std::vector<int> freq(17, 0);
  const auto logits = policy->predict_block_logits(problem(2.0));
  for (int i = 0; i < 10000; ++i) ++freq[decode::sample_block_count(logits, rng)];
  CHECK(std::max_element(freq.begin(), freq.end()) - freq.begin() == 0);
}

TEST_CASE("invalid configs are rejected") {
  auto cfg = SimPolicyConfig::defaults();
  cfg.anchors.clear();
  CHECK_THROWS_AS(make_sim_policy(cfg), Error);
  cfg = SimPolicyConfig::defaults();
  cfg.anchors[0].logits.pop_back();
  CHECK_THROWS_AS(make_sim_policy(cfg), Error);
  cfg = SimPolicyConfig::defaults();
  cfg.mismatch_rate = 1.5;
  CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("accuracy model shape") {
  AccuracyModel m;
  for (double d = 2.0; d <= 9.0; d += 0.5) {
    for (std::uint64_t k = 0; k < 16; ++k) {
      CHECK(m(d, k + 1) >= m(d, k));
      CHECK(m(d + 0.5, k) <= m(d, k));
      CHECK(m(d, k) >= 0.0);
      CHECK(m(d, k) <= 1.0);
    }
  }
  CHECK(m(2.0, 0) == doctest::Approx(0.90));
  CHECK(m(9.0, 0) == doctest::Approx(0.30));
}

TEST_CASE("generate_conditioned contract") {
  auto policy = make_sim_policy(SimPolicyConfig::defaults());
  Rng rng(6);
  for (std::uint64_t k = 0; k <= 16; ++k) {
    auto r = policy->generate_conditioned(problem(6.0), k, rng);
    CHECK(r.trace.declared_count == k);
    CHECK(r.trace.actual_count() == k);
    CHECK(r.trace.parsed_cleanly());
    CHECK(format::validate_consistency(r.trace).is_consistent);
    CHECK(r.problem_id == "p");
    CHECK(r.length > 0);
  }
}

TEST_CASE("mismatch injection") {
  auto cfg = SimPolicyConfig::defaults();
  cfg.mismatch_rate = 1.0;
  auto policy = make_sim_policy(cfg);
  Rng rng(7);
  auto r = policy->generate_conditioned(problem(6.0), 3, rng);
  CHECK(r.trace.declared_count == 4);
  CHECK(r.trace.actual_count() == 3);
  CHECK_THROWS_AS(decode::decode(*policy, problem(6.0), decode::CapSpec::automatic(), rng), Error);
}

TEST_CASE("same seed gives same streams") {
  auto policy = make_sim_policy(SimPolicyConfig::defaults());
  Rng a(8), b(8);
  for (int i = 0; i < 50; ++i) {
    auto ra = decode::decode(*policy, problem(7.0), decode::CapSpec::automatic(), a);
    auto rb = decode::decode(*policy, problem(7.0), decode::CapSpec::automatic(), b);
    REQUIRE(ra.k == rb.k);
    REQUIRE(format::serialize_trace(ra.response.trace) == format::serialize_trace(rb.response.trace));
  }
}

TEST_CASE("default_problems") {
  auto ps = default_problems(30);
  CHECK(ps.size() == 30);
  CHECK(ps[0].difficulty == 2.0);
  CHECK(ps[14].difficulty == 9.0);
  CHECK(ps[15].difficulty == 2.0);
  CHECK(ps[0].id != ps[1].id);
}

TEST_CASE("cap sweep direction and determinism") {
  auto policy = make_sim_policy(SimPolicyConfig::defaults());
  const auto problems = default_problems(150);
  std::vector<SweepCap> caps{{"<=0", decode::CapSpec::at_most(0)},
                             {"<=2", decode::CapSpec::at_most(2)},
                             {"<=6", decode::CapSpec::at_most(6)},
                             {"auto", decode::CapSpec::automatic()},
                             {">6", decode::CapSpec::at_least(7, 16)}};
  SweepOptions opt;
  opt.seed = 7;
  auto rep = run_cap_sweep(*policy, problems, caps, 2, opt);
  REQUIRE(rep.rows.size() == 5);
  CHECK(rep.reference_row == 3);
  CHECK(rep.rows[0].length.mean < rep.rows[1].length.mean);
  CHECK(rep.rows[1].length.mean < rep.rows[2].length.mean);
  CHECK(rep.rows[2].length.mean < rep.rows[4].length.mean);
  CHECK(rep.rows[0].accuracy.overall < rep.rows[3].accuracy.overall);
  CHECK(rep.rows[3].delta_accuracy == 0.0);
  CHECK(rep.rows[0].samples == 300);
  CHECK(rep.rows[0].mean_block_count == 0.0);
  for (const auto& row : rep.rows) CHECK(row.bad_cases.bad == 0);

  auto again = run_cap_sweep(*policy, problems, caps, 2, opt);
  CHECK(render_sweep_table(rep) == render_sweep_table(again));
  opt.seed = 8;
  CHECK(render_sweep_table(rep) != render_sweep_table(run_cap_sweep(*policy, problems, caps, 2, opt)));
}
