#include "expgap/trajectory.hpp"

#include <cmath>

#include "expgap/error.hpp"
#include "expgap/rng.hpp"

namespace expgap {

std::string_view policy_mode_name(PolicyMode mode) {
  return mode == PolicyMode::kGreedy ? "greedy" : "stochastic";
}

PolicyMode parse_policy_mode(std::string_view text) {
  if (text == "stochastic") return PolicyMode::kStochastic;
  if (text == "greedy") return PolicyMode::kGreedy;
  throw Error(ErrorCode::kSchemaError, "unknown policy_mode '" + std::string(text) + "'");
}

std::uint64_t episode_env_seed(std::int64_t run_seed, EpisodeId episode_id) {
  return derive_seed(static_cast<std::uint64_t>(run_seed), episode_id);
}

double sum_in_order(std::span<const double> values) {
  double total = 0.0;
  for (double v : values) total += v;
  return total;
}

EpisodeRecord finalize_episode(std::span<const Transition> transitions,
                               const RunIdentity& meta, PolicyMode policy_mode,
                               EpisodeId episode_id, std::uint64_t global_step_at_end) {
  if (transitions.empty()) {
    throw Error(ErrorCode::kEmptyEpisode, "episode " + std::to_string(episode_id) + " has no transitions");
  }
  const Transition& last = transitions.back();
  if (!last.done && !last.truncated) {
    throw Error(ErrorCode::kNonTerminal, "final transition carries no end-of-episode flag");
  }

  EpisodeRecord record;
  record.episode_id = episode_id;
  record.actions.reserve(transitions.size());
  record.rewards.reserve(transitions.size());
  double total = 0.0;
  for (std::size_t i = 0; i < transitions.size(); ++i) {
    const Transition& t = transitions[i];
    if (t.step_index != i) {
      throw Error(ErrorCode::kNonTerminal, "step_index " + std::to_string(t.step_index) +
                                               " at position " + std::to_string(i));
    }
    if (i + 1 < transitions.size() && (t.done || t.truncated)) {
      throw Error(ErrorCode::kNonTerminal, "episode ends early at step " + std::to_string(i));
    }
    if (!std::isfinite(t.reward) || !std::isfinite(t.intrinsic_reward)) {
      throw Error(ErrorCode::kNaNReward, "non-finite reward at step " + std::to_string(i));
    }
    record.actions.push_back(t.action);
    record.rewards.push_back(t.reward);
    total += t.reward + t.intrinsic_reward;
  }
  record.return_extrinsic = sum_in_order(record.rewards);
  record.return_total = total;
  record.length = static_cast<std::uint32_t>(transitions.size());
  record.env_seed = episode_env_seed(meta.seed, episode_id);
  record.policy_mode = policy_mode;
  record.global_step_at_end = global_step_at_end;
  record.truncated = last.truncated && !last.done;
  record.env_name = meta.env_name;
  record.algorithm_name = meta.algorithm_name;
  record.run_seed = meta.seed;
  return record;
}

std::string stable_digest(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kHex[h & 0xF];
    h >>= 4;
  }
  return out;
}

}  // namespace expgap
