#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "expgap/estimators.hpp"
#include "expgap/trajectory.hpp"

namespace expgap {

struct TrackerConfig {
  std::size_t recent_window = 100;  // W
  std::size_t eval_window = 20;     // W_eval
  std::size_t top_capacity = 64;    // C
  std::size_t initial_episodes = 8; // M
  double fraction = 0.05;

  bool operator==(const TrackerConfig&) const = default;
};

void validate(const TrackerConfig& config);

struct MetricsPoint {
  std::uint64_t global_step = 0;
  PolicyMode policy_mode = PolicyMode::kStochastic;
  // NaN when no episode of policy_mode has been recorded yet.
  double v_learned = 0.0;
  double v_best_single = 0.0;
  double v_top5_ever = 0.0;
  double v_top5_recent = 0.0;
  double v_initial = 0.0;
  // True while fewer than M episodes have been seen; v_initial is then the
  // mean over what has been seen so far.
  bool initial_provisional = false;
  double gap_ever = 0.0;
  double gap_recent = 0.0;

  bool operator==(const MetricsPoint&) const = default;
};

// Streaming accumulator over one run. Keeps every scalar extrinsic return (the
// all-time pool), full records only for the C best episodes, a ring of the
// last W returns standing in for a replay buffer, and per-mode rings of the
// last W_eval returns for the learned-policy estimate.
class ExperienceTracker {
 public:
  struct ReturnEntry {
    EpisodeId episode_id;
    double return_extrinsic;
  };

  explicit ExperienceTracker(TrackerConfig config = {});

  // Throws OutOfOrderEpisode unless episode_id exceeds every previous id, and
  // NaNReward on a non-finite return.
  void record_episode(const EpisodeRecord& episode);

  // Throws NoEpisodes on an empty tracker.
  MetricsPoint snapshot(std::uint64_t global_step, PolicyMode mode) const;

  // Mean return of the first M episodes. Throws TooFewEpisodes before M
  // episodes have been recorded; the value never changes afterwards.
  double freeze_initial_value() const;

  std::optional<double> learned_value(PolicyMode mode) const;
  const EpisodeRecord& best_episode() const;
  // Best first: return descending, then episode_id ascending.
  std::vector<EpisodeRecord> top_episodes() const;

  std::span<const ReturnEntry> all_returns() const { return all_returns_; }
  std::size_t episode_count() const { return all_returns_.size(); }
  const TrackerConfig& config() const { return config_; }

 private:
  struct TopKey {
    double return_extrinsic;
    EpisodeId episode_id;
    bool operator<(const TopKey& other) const {
      if (return_extrinsic != other.return_extrinsic) return return_extrinsic > other.return_extrinsic;
      return episode_id < other.episode_id;
    }
  };

  TrackerConfig config_;
  std::vector<ReturnEntry> all_returns_;
  std::vector<double> return_values_;
  std::map<TopKey, EpisodeRecord> top_store_;
  std::deque<double> recent_window_;
  std::deque<double> eval_stochastic_;
  std::deque<double> eval_greedy_;
  std::vector<double> initial_returns_;
  std::optional<EpisodeId> last_id_;
};

}  // namespace expgap
