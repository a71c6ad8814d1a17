#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "blockcot/rl_objective.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace blockcot;
using namespace blockcot::rl;

namespace {

SampledResponse with_blocks(bool correct, std::uint64_t declared, std::vector<std::string> blocks) {
  SampledResponse r;
  r.problem_id = "p";
  r.correct = correct;
  r.trace.declared_count = declared;
  r.trace.blocks = std::move(blocks);
  return r;
}

std::string tokens(int n) {
  std::string s;
  for (int i = 0; i < n; ++i) s += i ? " t" : "t";
  return s;
}

const Multipliers kTable{0.1, 0.05, 0.5, 0.1};

}  // namespace

TEST_CASE("reference_reward_estimate") {
  CHECK(reference_reward_estimate(std::vector<int>{1, 0, 1, 0}) == 0.5);
  CHECK(reference_reward_estimate(std::vector<int>{0, 0, 0}) == 0.0);
  CHECK(reference_reward_estimate(std::vector<int>{1}) == 1.0);
  try {
    reference_reward_estimate(std::vector<int>{});
    FAIL("expected EmptyList");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyList);
  }
}

TEST_CASE("accuracy_scale and multipliers") {
  RewardConfig cfg;
  CHECK(accuracy_scale(0.75, cfg) == 0.0);
  CHECK(accuracy_scale(0.9, cfg) == 1.0);
  CHECK(accuracy_scale(0.825, cfg) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(accuracy_scale(0.1, cfg) == 0.0);
  CHECK(accuracy_scale(1.0, cfg) == 1.0);

  CHECK(scaled_multipliers(cfg, 0.0) == Multipliers{0, 0, 0, 0});
  CHECK(scaled_multipliers(cfg, 1.0) == kTable);
  CHECK(scaled_multipliers(cfg, 0.5).block_len == 0.25);

  double prev = -1;
  for (int i = 0; i <= 1000; ++i) {
    const double h = accuracy_scale(i / 1000.0, cfg);
    CHECK(h >= prev);
    prev = h;
  }
}

TEST_CASE("config validation") {
  RewardConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  auto bad = cfg;
  bad.p_low = 0.95;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = cfg;
  bad.lambda_star.count = -1;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = cfg;
  bad.block_len_normalizer = 0;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = cfg;
  bad.eps_low = 0;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("advantage examples") {
  RewardConfig cfg;
  auto nothink = with_blocks(true, 0, {});
  CHECK(advantage(nothink, 0.5, kTable, cfg).total == doctest::Approx(0.6).epsilon(1e-12));

  auto neutral = with_blocks(true, 2, {"a", "b"});
  CHECK(advantage(neutral, 1.0, Multipliers{}, cfg).total == 0.0);

  auto two = with_blocks(true, 2, {tokens(10), tokens(20)});
  auto a = advantage(two, 0.5, kTable, cfg);
  CHECK(a.total == doctest::Approx(-7.1).epsilon(1e-12));
  CHECK(a.count_penalty == doctest::Approx(0.1));
  CHECK(a.block_len_penalty == doctest::Approx(7.5));

  auto consistent = with_blocks(true, 2, {"x", "y"});
  auto declared3 = with_blocks(true, 3, {"x", "y"});
  const double diff = advantage(declared3, 0.5, kTable, cfg).total - advantage(consistent, 0.5, kTable, cfg).total;
  // One extra declared block costs lambda_2 and the mismatch costs lambda_4.
  CHECK(diff == doctest::Approx(-0.05 - 0.1).epsilon(1e-12));
  CHECK(advantage(declared3, 0.5, kTable, cfg).format_penalty == doctest::Approx(0.1));

  // Declaring zero while emitting blocks earns no bonus.
  auto gamed = with_blocks(true, 0, {"x"});
  CHECK(advantage(gamed, 0.5, kTable, cfg).nothink_bonus == 0.0);
}

TEST_CASE("block_len_normalizer divides the length term") {
  RewardConfig cfg;
  cfg.block_len_normalizer = 10.0;
  auto two = with_blocks(true, 2, {tokens(10), tokens(20)});
  CHECK(advantage(two, 0.5, kTable, cfg).block_len_penalty == doctest::Approx(0.75));
}

TEST_CASE("ppo surrogate") {
  RewardConfig cfg;
  CHECK(ppo_surrogate(0.0, 0.0, 1.0, cfg) == 1.0);
  CHECK(ppo_surrogate(std::log(2.0), 0.0, 1.0, cfg) == doctest::Approx(1.28));
  CHECK(ppo_surrogate(std::log(0.5), 0.0, -1.0, cfg) == doctest::Approx(-0.8));
  CHECK(clipped_surrogate(2.0, 1.0, cfg) == doctest::Approx(1.28));
  try {
    ppo_surrogate(1000.0, 0.0, 1.0, cfg);
    FAIL("expected NonFiniteRatio");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonFiniteRatio);
  }
  CHECK_THROWS_AS(ppo_surrogate(std::nan(""), 0.0, 1.0, cfg), Error);
}

TEST_CASE("rollout_objective") {
  RewardConfig cfg;
  auto nothink = with_blocks(true, 0, {});
  auto two = with_blocks(true, 2, {tokens(10), tokens(20)});
  std::vector<RolloutSample> one{{&nothink, 0.5}};
  CHECK(rollout_objective(one, kTable, cfg).total == doctest::Approx(advantage(nothink, 0.5, kTable, cfg).total));
  std::vector<RolloutSample> both{{&nothink, 0.5}, {&two, 0.5}};
  auto s = rollout_objective(both, kTable, cfg);
  CHECK(s.total == doctest::Approx(-3.25).epsilon(1e-12));
  CHECK(s.nothink_fraction == 0.5);
  CHECK(s.samples == 2);
  CHECK(rollout_objective(both, Multipliers{}, cfg).total == doctest::Approx(0.5));
  try {
    rollout_objective(std::vector<RolloutSample>{}, kTable, cfg);
    FAIL("expected EmptyBatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyBatch);
  }
}

TEST_CASE("group_advantage scale modes") {
  RewardConfig cfg;
  std::vector<SampledResponse> g{with_blocks(true, 0, {}), with_blocks(true, 1, {"a"}),
                                 with_blocks(true, 1, {"a"}), with_blocks(false, 2, {"a", "b"})};
  std::vector<int> ref{1, 1, 1, 0};
  auto pg = group_advantage(g, ref, cfg, ScaleMode::PerGroup);
  CHECK(pg.r_ref == 0.75);
  CHECK(pg.accuracy == 0.75);
  CHECK(pg.h == 0.0);
  CHECK(pg.lambdas == Multipliers{});
  CHECK(pg.per_sample.size() == 4);
  CHECK(pg.per_sample[0].total == doctest::Approx(0.25));

  auto none = group_advantage(g, ref, cfg, ScaleMode::None);
  CHECK(none.lambdas == kTable);

  auto batch = group_advantage(g, ref, cfg, ScaleMode::Batch, 0.9);
  CHECK(batch.h == 1.0);
}

TEST_CASE("pairwise_sum") {
  CHECK(pairwise_sum(std::vector<double>{}) == 0.0);
  CHECK(pairwise_sum(std::vector<double>{1, 2, 3, 4, 5}) == 15.0);
}

TEST_CASE("property: advantage matches direct evaluation") {
  Rng rng(21);
  RewardConfig cfg;
  for (int i = 0; i < 20000; ++i) {
    auto r = gen::response(rng, "p");
    Multipliers m{uniform01(rng), uniform01(rng), uniform01(rng), uniform01(rng)};
    cfg.block_len_normalizer = 0.5 + uniform01(rng) * 10;
    const double r_ref = uniform01(rng);
    const auto a = advantage(r, r_ref, m, cfg);
    const double expect = oracle::advantage({r.correct, r_ref, r.trace.declared_count, r.trace.blocks, m.nothink_bonus,
                                             m.count, m.block_len, m.seg_count, cfg.block_len_normalizer});
    REQUIRE(std::fabs(a.total - expect) <= 1e-12);
    REQUIRE(a.total == a.task_delta + a.nothink_bonus - a.count_penalty - a.block_len_penalty - a.format_penalty);
  }
}

TEST_CASE("property: adding one block costs lambda_2 plus the length change") {
  Rng rng(22);
  RewardConfig cfg;
  for (int i = 0; i < 2000; ++i) {
    auto r = gen::response(rng, "p");
    r.trace.declared_count = r.trace.blocks.size();
    if (r.trace.blocks.empty()) continue;
    auto bigger = r;
    bigger.trace.blocks.push_back(gen::words(rng, uniform_int(rng, 1, 30)));
    bigger.trace.declared_count += 1;
    const auto a0 = advantage(r, 0.5, kTable, cfg);
    const auto a1 = advantage(bigger, 0.5, kTable, cfg);
    const double len_change = kTable.block_len * (mean_block_length(bigger.trace) - mean_block_length(r.trace));
    REQUIRE(a1.total - a0.total == doctest::Approx(-kTable.count - len_change).epsilon(1e-12));
  }
}

TEST_CASE("property: ppo matches two-branch form") {
  Rng rng(23);
  RewardConfig cfg;
  for (int i = 0; i < 20000; ++i) {
    const double ratio = uniform01(rng) * 3.0;
    const double adv = uniform01(rng) * 10.0 - 5.0;
    REQUIRE(std::fabs(clipped_surrogate(ratio, adv, cfg) - oracle::ppo_two_branch(ratio, adv, 0.2, 0.28)) <= 1e-12);
    const double inside = 0.8 + uniform01(rng) * 0.48;
    REQUIRE(clipped_surrogate(inside, adv, cfg) == inside * adv);
  }
}

TEST_CASE("property: rollout total is the mean of per-sample totals") {
  Rng rng(24);
  RewardConfig cfg;
  for (int i = 0; i < 200; ++i) {
    const auto n = uniform_int(rng, 1, 30);
    std::vector<SampledResponse> rs;
    for (std::uint64_t j = 0; j < n; ++j) rs.push_back(gen::response(rng, "p"));
    std::vector<RolloutSample> batch;
    double sum = 0;
    for (const auto& r : rs) {
      batch.push_back({&r, 0.4});
      sum += advantage(r, 0.4, kTable, cfg).total;
    }
    REQUIRE(rollout_objective(batch, kTable, cfg).total == doctest::Approx(sum / n).epsilon(1e-12));
  }
}
