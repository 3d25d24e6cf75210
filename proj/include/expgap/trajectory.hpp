#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace expgap {

using ActionId = std::int32_t;
using EpisodeId = std::uint64_t;

enum class PolicyMode { kStochastic, kGreedy };

std::string_view policy_mode_name(PolicyMode mode);
PolicyMode parse_policy_mode(std::string_view text);

struct Transition {
  std::uint32_t step_index = 0;
  ActionId action = 0;
  double reward = 0.0;
  double intrinsic_reward = 0.0;
  bool done = false;
  bool truncated = false;
};

struct RunIdentity {
  std::string algorithm_name;
  std::string env_name;
  std::int64_t seed = 0;
  std::string config_digest;

  bool operator==(const RunIdentity&) const = default;
};

// One completed episode. Estimators only ever look at return_extrinsic;
// return_total (extrinsic + exploration bonus) exists for the learner's sake.
struct EpisodeRecord {
  EpisodeId episode_id = 0;
  std::vector<ActionId> actions;
  // Per-step extrinsic rewards. Empty when the source only supplied a return.
  std::vector<double> rewards;
  double return_extrinsic = 0.0;
  double return_total = 0.0;
  std::uint32_t length = 0;
  std::uint64_t env_seed = 0;
  PolicyMode policy_mode = PolicyMode::kStochastic;
  std::uint64_t global_step_at_end = 0;
  bool truncated = false;

  std::string env_name;
  std::string algorithm_name;
  std::int64_t run_seed = 0;

  bool operator==(const EpisodeRecord&) const = default;
};

// Seed the environment is reset with for a given episode of a run. Shared by
// the runner, log ingestion and replay so a log alone determines replays.
std::uint64_t episode_env_seed(std::int64_t run_seed, EpisodeId episode_id);

// Builds an EpisodeRecord from a finished transition sequence. Sums rewards in
// step order, so the return is reproducible bit for bit.
EpisodeRecord finalize_episode(std::span<const Transition> transitions,
                               const RunIdentity& meta, PolicyMode policy_mode,
                               EpisodeId episode_id,
                               std::uint64_t global_step_at_end = 0);

// Sequential left-to-right sum; the single summation order used for returns.
double sum_in_order(std::span<const double> values);

// FNV-1a 64, rendered as 16 lowercase hex digits. Stable across platforms.
std::string stable_digest(std::string_view bytes);

}  // namespace expgap
