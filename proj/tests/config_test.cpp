#include <gtest/gtest.h>

#include "expgap/config.hpp"
#include "test_util.hpp"

namespace expgap {
namespace {

using testing::error_code_of;

TEST(ParseConfig, ReadsEverySection) {
  const RunConfig c = parse_config(
      "# comment\n"
      "[env]\nname = key_corridor\nsize = 12\nstochastic_slip = 0.25\nmax_steps = 30\n\n"
      "[agent]\nkind = policy_gradient\nlearning_rate = 0.05\nbonus_beta = 0.3\naggregation_factor = 2\n"
      "[tracker]\nrecent_window = 50\neval_window = 10\ntop_capacity = 16\ninitial_episodes = 4\nfraction = 0.1\n"
      "[run]\nn_episodes = 300\neval_every = 25\ngreedy_eval = false\neval_episodes = 3\n"
      "seeds = 4, 5,6\noutput_dir = out/here\n");
  EXPECT_EQ(c.env.kind, EnvKind::kKeyCorridor);
  EXPECT_EQ(c.env.size, 12u);
  EXPECT_EQ(c.env.stochastic_slip, 0.25);
  EXPECT_EQ(c.env.max_steps, 30u);
  EXPECT_EQ(c.agent.kind, AgentKind::kPolicyGradient);
  EXPECT_EQ(c.agent.learning_rate, 0.05);
  EXPECT_EQ(c.agent.bonus_beta, 0.3);
  EXPECT_EQ(c.agent.aggregation_factor, 2u);
  EXPECT_EQ(c.agent.gamma, AgentSpec{}.gamma);
  EXPECT_EQ(c.tracker.recent_window, 50u);
  EXPECT_EQ(c.tracker.fraction, 0.1);
  EXPECT_EQ(c.n_episodes, 300u);
  EXPECT_FALSE(c.greedy_eval);
  EXPECT_EQ(c.eval_episodes, 3u);
  EXPECT_EQ(c.seeds, (std::vector<std::int64_t>{4, 5, 6}));
  EXPECT_EQ(c.output_dir, "out/here");
}

TEST(RenderConfig, RoundTripsAndDigestIgnoresFormatting) {
  RunConfig c;
  c.env.kind = EnvKind::kMiniInvaders;
  c.agent.epsilon_end = 0.1 + 0.2;
  c.seeds = {0, 1, 2, 3};
  const std::string text = render_config(c);
  const RunConfig back = parse_config(text);
  EXPECT_EQ(render_config(back), text);
  EXPECT_EQ(back.agent, c.agent);
  EXPECT_EQ(config_digest(parse_config("# a comment\n" + text + "\n\n")), config_digest(c));
  RunConfig moved = c;
  moved.output_dir = "elsewhere";
  EXPECT_EQ(config_digest(moved), config_digest(c));
  RunConfig changed = c;
  changed.n_episodes += 1;
  EXPECT_NE(config_digest(changed), config_digest(c));
}

TEST(ParseConfig, Errors) {
  EXPECT_EQ(error_code_of([] { parse_config("[envs]\nname = deep_sea\n"); }), ErrorCode::kConfigError);
  EXPECT_EQ(error_code_of([] { parse_config("[env]\ncolour = red\n"); }), ErrorCode::kConfigError);
  EXPECT_EQ(error_code_of([] { parse_config("name = deep_sea\n"); }), ErrorCode::kConfigError);
  EXPECT_EQ(error_code_of([] { parse_config("[env]\nsize = many\n"); }), ErrorCode::kConfigError);
  EXPECT_EQ(error_code_of([] { parse_config("[run]\nseeds =\n"); }), ErrorCode::kConfigError);
  EXPECT_EQ(error_code_of([] { parse_config("[tracker]\nfraction = 0\n"); }), ErrorCode::kConfigError);
  EXPECT_EQ(error_code_of([] { load_config("/nonexistent.cfg"); }), ErrorCode::kIoFailure);
}

TEST(SeedSpecs, SeedReachesEnvAndAgent) {
  RunConfig c;
  EXPECT_EQ(env_for_seed(c, 9).seed, 9);
  EXPECT_EQ(agent_for_seed(c, 9).seed, 9);
}

}  // namespace
}  // namespace expgap
