#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "expgap/experiment.hpp"
#include "expgap/trajectory.hpp"
#include "test_util.hpp"

namespace expgap {
namespace {

using testing::error_code_of;

std::vector<Transition> make_episode(const std::vector<double>& rewards, bool truncated = false) {
  std::vector<Transition> ts;
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    Transition t;
    t.step_index = static_cast<std::uint32_t>(i);
    t.action = static_cast<ActionId>(i % 2);
    t.reward = rewards[i];
    ts.push_back(t);
  }
  if (!ts.empty()) (truncated ? ts.back().truncated : ts.back().done) = true;
  return ts;
}

const RunIdentity kMeta{"q_learning", "deep_sea", 3, "abc"};

TEST(FinalizeEpisode, SumsRewards) {
  const auto e = finalize_episode(make_episode({0, 0, 1}), kMeta, PolicyMode::kStochastic, 0);
  EXPECT_EQ(e.return_extrinsic, 1.0);
  EXPECT_EQ(e.length, 3u);
  EXPECT_EQ(e.actions, (std::vector<ActionId>{0, 1, 0}));
  EXPECT_EQ(e.env_name, "deep_sea");
  EXPECT_EQ(e.env_seed, episode_env_seed(3, 0));
}

TEST(FinalizeEpisode, SingleZeroRewardStep) {
  const auto e = finalize_episode(make_episode({0}), kMeta, PolicyMode::kGreedy, 4);
  EXPECT_EQ(e.return_extrinsic, 0.0);
  EXPECT_EQ(e.length, 1u);
  EXPECT_EQ(e.policy_mode, PolicyMode::kGreedy);
}

TEST(FinalizeEpisode, ReturnMatchesRunningSumExactly) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> rewards(50);
    for (double& r : rewards) r = dist(gen);
    double oracle = 0.0;
    for (std::size_t i = 0; i < rewards.size(); ++i) oracle = oracle + rewards[i];
    const auto e = finalize_episode(make_episode(rewards), kMeta, PolicyMode::kStochastic, 1);
    EXPECT_TRUE(testing::same_bits(e.return_extrinsic, oracle));
    EXPECT_EQ(e.length, e.actions.size());
  }
}

TEST(FinalizeEpisode, IntrinsicRewardStaysOutOfExtrinsicReturn) {
  auto ts = make_episode({0.5, 0.25});
  ts[0].intrinsic_reward = 1.0;
  const auto e = finalize_episode(ts, kMeta, PolicyMode::kStochastic, 0);
  EXPECT_EQ(e.return_extrinsic, 0.75);
  EXPECT_EQ(e.return_total, 1.75);
}

TEST(FinalizeEpisode, TruncatedEpisodeIsComplete) {
  const auto e = finalize_episode(make_episode({1, 1}, true), kMeta, PolicyMode::kStochastic, 0);
  EXPECT_TRUE(e.truncated);
  EXPECT_EQ(e.return_extrinsic, 2.0);
}

TEST(FinalizeEpisode, Errors) {
  EXPECT_EQ(error_code_of([] { finalize_episode({}, kMeta, PolicyMode::kStochastic, 0); }),
            ErrorCode::kEmptyEpisode);
  auto open = make_episode({1, 2});
  open.back().done = false;
  EXPECT_EQ(error_code_of([&] { finalize_episode(open, kMeta, PolicyMode::kStochastic, 0); }),
            ErrorCode::kNonTerminal);
  auto early = make_episode({1, 2, 3});
  early[0].done = true;
  EXPECT_EQ(error_code_of([&] { finalize_episode(early, kMeta, PolicyMode::kStochastic, 0); }),
            ErrorCode::kNonTerminal);
  auto nan = make_episode({1, std::nan("")});
  EXPECT_EQ(error_code_of([&] { finalize_episode(nan, kMeta, PolicyMode::kStochastic, 0); }),
            ErrorCode::kNaNReward);
}

TEST(RunEpisodes, IdsAreGapless) {
  ExperimentOptions options;
  options.n_episodes = 40;
  options.eval_every = 7;
  const RunLog log = run_experiment({EnvKind::kDeepSea, 5}, AgentSpec{}, options);
  for (std::size_t i = 0; i < log.episodes.size(); ++i) {
    EXPECT_EQ(log.episodes[i].episode_id, i);
    EXPECT_EQ(log.episodes[i].length, log.episodes[i].actions.size());
  }
}

TEST(StableDigest, KnownVectors) {
  // FNV-1a 64 reference values.
  EXPECT_EQ(stable_digest(""), "cbf29ce484222325");
  EXPECT_EQ(stable_digest("a"), "af63dc4c8601ec8c");
  EXPECT_EQ(stable_digest("config"), stable_digest(std::string("config")));
  EXPECT_NE(stable_digest("config"), stable_digest("config "));
}

TEST(PolicyMode, Names) {
  EXPECT_EQ(parse_policy_mode(policy_mode_name(PolicyMode::kGreedy)), PolicyMode::kGreedy);
  EXPECT_EQ(parse_policy_mode("stochastic"), PolicyMode::kStochastic);
  EXPECT_THROW(parse_policy_mode("argmax"), Error);
}

}  // namespace
}  // namespace expgap
