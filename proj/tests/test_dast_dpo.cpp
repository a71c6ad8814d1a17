#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "blockcot/dast_dpo.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace blockcot;
using namespace blockcot::dast;

namespace {

SampledResponse resp(std::uint64_t length, bool correct, std::uint64_t blocks = 0, std::string pid = "p") {
  SampledResponse r;
  r.problem_id = std::move(pid);
  r.length = length;
  r.correct = correct;
  for (std::uint64_t i = 0; i < blocks; ++i) r.trace.blocks.push_back("b");
  r.trace.declared_count = blocks;
  return r;
}

BudgetStats stats_with(double budget) {
  BudgetStats s;
  s.budget = budget;
  return s;
}

}  // namespace

TEST_CASE("token_length_budget") {
  std::vector<SampledResponse> g{resp(100, true), resp(200, false), resp(300, true), resp(400, false)};
  auto s = token_length_budget(g);
  CHECK(s.p == doctest::Approx(0.5));
  CHECK(s.mean_length == doctest::Approx(250));
  CHECK(s.max_length == 400);
  CHECK(s.budget == doctest::Approx(525));

  std::vector<SampledResponse> wrong{resp(10, false), resp(70, false)};
  CHECK(token_length_budget(wrong).budget == 70.0);

  std::vector<SampledResponse> one{resp(80, true)};
  CHECK(token_length_budget(one).budget == 160.0);

  std::vector<SampledResponse> same{resp(37, true), resp(37, true), resp(37, true)};
  CHECK(token_length_budget(same).budget == 74.0);
}

TEST_CASE("token_length_budget errors") {
  std::vector<SampledResponse> empty;
  CHECK_THROWS_AS(token_length_budget(empty), Error);
  std::vector<SampledResponse> mixed{resp(1, true, 0, "a"), resp(2, true, 0, "b")};
  try {
    token_length_budget(mixed);
    FAIL("expected MixedGroup");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MixedGroup);
  }
}

TEST_CASE("calibrated_reward examples") {
  const auto st = stats_with(200);
  CHECK(calibrated_reward(resp(200, true), st) == doctest::Approx(0.5));
  CHECK(calibrated_reward(resp(200, false), st) == doctest::Approx(-0.1));
  CHECK(calibrated_reward(resp(400, true), st) == doctest::Approx(0.1));
  CHECK(calibrated_reward(resp(100, false), st) == doctest::Approx(-0.55));
  CHECK(calibrated_reward(resp(0, true), st) == doctest::Approx(1.0));
  try {
    calibrated_reward(resp(0, true), stats_with(0));
    FAIL("expected ZeroBudget");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ZeroBudget);
  }
  std::vector<SampledResponse> empties{resp(0, true), resp(0, false)};
  CHECK_THROWS_AS(group_rewards(empties), Error);
}

TEST_CASE("build_preference_pairs examples") {
  std::vector<SampledResponse> g{resp(1, true, 2), resp(1, false, 5)};
  std::vector<double> r{0.5, -0.1};
  auto pairs = build_preference_pairs(g, r, 0.3);
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0].chosen_index == 0);
  CHECK(pairs[0].rejected_index == 1);
  CHECK(pairs[0].reward_gap() == doctest::Approx(0.6));

  std::vector<double> close{0.5, 0.45};
  CHECK(build_preference_pairs(g, close, 0.3).empty());

  std::vector<SampledResponse> g2{resp(1, true, 6), resp(1, false, 2)};
  CHECK(build_preference_pairs(g2, r, 0.3).empty());

  std::vector<SampledResponse> ties{resp(1, true, 3), resp(1, false, 3)};
  CHECK(build_preference_pairs(ties, r, 0.3).size() == 1);
}

TEST_CASE("dpo_loss") {
  PreferencePair p;
  p.chosen.logprob_policy = -3.0;
  p.chosen.logprob_ref = -3.0;
  p.rejected.logprob_policy = -3.0;
  p.rejected.logprob_ref = -3.0;
  CHECK(dpo_loss(p, 1.0) == doctest::Approx(0.693147).epsilon(1e-6));

  p.chosen.logprob_policy = 0.0;
  p.rejected.logprob_policy = -10.0;
  p.chosen.logprob_ref = -1.0;
  p.rejected.logprob_ref = -1.0;
  CHECK(dpo_loss(p, 1.0) == doctest::Approx(4.5399e-5).epsilon(1e-3));

  // beta = 2 on margin m equals beta = 1 on margin 2m.
  PreferencePair q = p;
  q.rejected.logprob_policy = -20.0;
  CHECK(dpo_loss(p, 2.0) == doctest::Approx(dpo_loss(q, 1.0)).epsilon(1e-12));

  PreferencePair missing = p;
  missing.rejected.logprob_ref.reset();
  try {
    dpo_loss(missing);
    FAIL("expected MissingLogProb");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MissingLogProb);
  }
}

TEST_CASE("neg_log_sigmoid is stable") {
  CHECK(neg_log_sigmoid(0.0) == doctest::Approx(std::log(2.0)));
  CHECK(std::isfinite(neg_log_sigmoid(-1000.0)));
  CHECK(neg_log_sigmoid(-1000.0) == doctest::Approx(1000.0));
  CHECK(neg_log_sigmoid(1000.0) >= 0.0);
}

TEST_CASE("property: separation, range and oracle agreement") {
  Rng rng(11);
  for (int i = 0; i < 20000; ++i) {
    const double budget = 1.0 + uniform01(rng) * 5000.0;
    const auto len = uniform_int(rng, 0, 20000);
    const bool correct = bernoulli(rng, 0.5);
    const double r = calibrated_reward(resp(len, correct), stats_with(budget));
    REQUIRE(r == oracle::dast_reward(static_cast<double>(len), budget, correct));
    if (correct) {
      REQUIRE(r >= 0.1);
      REQUIRE(r <= 1.0);
    } else {
      REQUIRE(r <= -0.1);
    }
  }
}

TEST_CASE("property: monotone in length") {
  Rng rng(12);
  for (int i = 0; i < 500; ++i) {
    const auto st = stats_with(1.0 + uniform01(rng) * 1000.0);
    double prev_c = 2.0, prev_w = -1e300;
    for (std::uint64_t len = 0; len < 3000; len += 1 + uniform_int(rng, 0, 50)) {
      const double c = calibrated_reward(resp(len, true), st);
      const double w = calibrated_reward(resp(len, false), st);
      REQUIRE(c <= prev_c);
      REQUIRE(w >= prev_w);
      prev_c = c;
      prev_w = w;
    }
  }
}

TEST_CASE("property: pairs match brute force and prefer correct") {
  Rng rng(13);
  for (int i = 0; i < 1000; ++i) {
    const auto s = uniform_int(rng, 1, 8);
    std::vector<SampledResponse> g;
    for (std::uint64_t j = 0; j < s; ++j) g.push_back(gen::response(rng, "p"));
    if (token_length_budget(g).budget <= 0) continue;
    const double delta = uniform01(rng) * 0.8;
    const auto rewards = group_rewards(g);
    std::vector<double> rv(rewards.begin(), rewards.end());
    std::vector<std::uint64_t> counts;
    for (const auto& r : g) counts.push_back(r.trace.declared_count);
    const auto pairs = build_preference_pairs(g, delta);
    std::set<std::pair<std::size_t, std::size_t>> got;
    for (const auto& p : pairs) {
      got.insert({p.chosen_index, p.rejected_index});
      if (g[p.chosen_index].correct != g[p.rejected_index].correct) REQUIRE(g[p.chosen_index].correct);
    }
    REQUIRE(got.size() == pairs.size());
    REQUIRE(got == oracle::brute_force_pairs(rv, counts, delta));
    // Ordered scan means lexicographic order of (chosen, rejected).
    for (std::size_t k = 1; k < pairs.size(); ++k) {
      REQUIRE(std::pair(pairs[k - 1].chosen_index, pairs[k - 1].rejected_index) <
              std::pair(pairs[k].chosen_index, pairs[k].rejected_index));
    }
  }
}
