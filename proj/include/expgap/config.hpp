#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "expgap/agents.hpp"
#include "expgap/environments.hpp"
#include "expgap/experience_tracker.hpp"

namespace expgap {

// Plain-text run configuration:
//
//   # comment
//   [env]
//   name = deep_sea
//   size = 16
//   [agent]
//   kind = q_learning
//   ...
//   [tracker]
//   recent_window = 100
//   [run]
//   seeds = 0, 1, 2, 3
//
// Unknown sections or keys are errors. Omitted keys keep their defaults.
struct RunConfig {
  EnvSpec env;
  AgentSpec agent;
  TrackerConfig tracker;
  std::size_t n_episodes = 1000;
  std::size_t eval_every = 50;
  bool greedy_eval = true;
  std::size_t eval_episodes = 1;
  std::vector<std::int64_t> seeds = {0};
  std::filesystem::path output_dir = "runs";
};

RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

// Canonical rendering with every key spelled out; parse_config(render_config(c))
// reproduces c.
std::string render_config(const RunConfig& config);

// stable_digest of the canonical rendering. Formatting, comments and the
// output directory do not affect it.
std::string config_digest(const RunConfig& config);

// Per-seed specs: env.seed and agent.seed are both set to the run seed.
EnvSpec env_for_seed(const RunConfig& config, std::int64_t seed);
AgentSpec agent_for_seed(const RunConfig& config, std::int64_t seed);

}  // namespace expgap
