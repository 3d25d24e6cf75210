#include "expgap/experience_tracker.hpp"

#include <cmath>
#include <limits>

#include "expgap/error.hpp"

namespace expgap {

namespace {

void push_bounded(std::deque<double>& ring, double value, std::size_t capacity) {
  ring.push_back(value);
  while (ring.size() > capacity) ring.pop_front();
}

double ring_mean(const std::deque<double>& ring) {
  const std::vector<double> values(ring.begin(), ring.end());
  return mean_of(values);
}

}  // namespace

void validate(const TrackerConfig& config) {
  if (config.recent_window == 0 || config.eval_window == 0 || config.top_capacity == 0 ||
      config.initial_episodes == 0) {
    throw Error(ErrorCode::kInvalidSpec, "tracker windows and capacities must be positive");
  }
  if (!(config.fraction > 0.0 && config.fraction <= 1.0)) {
    throw Error(ErrorCode::kInvalidSpec, "tracker fraction must lie in (0, 1]");
  }
}

ExperienceTracker::ExperienceTracker(TrackerConfig config) : config_(config) {
  validate(config_);
}

void ExperienceTracker::record_episode(const EpisodeRecord& episode) {
  if (last_id_ && episode.episode_id <= *last_id_) {
    throw Error(ErrorCode::kOutOfOrderEpisode, "episode_id " + std::to_string(episode.episode_id) +
                                                   " after " + std::to_string(*last_id_));
  }
  if (!std::isfinite(episode.return_extrinsic)) {
    throw Error(ErrorCode::kNaNReward, "episode " + std::to_string(episode.episode_id) +
                                           " has a non-finite return");
  }
  last_id_ = episode.episode_id;
  const double r = episode.return_extrinsic;

  all_returns_.push_back({episode.episode_id, r});
  return_values_.push_back(r);

  top_store_.emplace(TopKey{r, episode.episode_id}, episode);
  if (top_store_.size() > config_.top_capacity) top_store_.erase(std::prev(top_store_.end()));

  push_bounded(recent_window_, r, config_.recent_window);
  push_bounded(episode.policy_mode == PolicyMode::kGreedy ? eval_greedy_ : eval_stochastic_, r,
               config_.eval_window);
  if (initial_returns_.size() < config_.initial_episodes) initial_returns_.push_back(r);
}

std::optional<double> ExperienceTracker::learned_value(PolicyMode mode) const {
  const auto& ring = mode == PolicyMode::kGreedy ? eval_greedy_ : eval_stochastic_;
  if (ring.empty()) return std::nullopt;
  return ring_mean(ring);
}

double ExperienceTracker::freeze_initial_value() const {
  if (initial_returns_.size() < config_.initial_episodes) {
    throw Error(ErrorCode::kTooFewEpisodes, std::to_string(initial_returns_.size()) + " of " +
                                                std::to_string(config_.initial_episodes) +
                                                " initial-policy episodes recorded");
  }
  return mean_of(initial_returns_);
}

const EpisodeRecord& ExperienceTracker::best_episode() const {
  if (top_store_.empty()) throw Error(ErrorCode::kNoEpisodes, "no episodes recorded");
  return top_store_.begin()->second;
}

std::vector<EpisodeRecord> ExperienceTracker::top_episodes() const {
  std::vector<EpisodeRecord> out;
  out.reserve(top_store_.size());
  for (const auto& [key, record] : top_store_) out.push_back(record);
  return out;
}

MetricsPoint ExperienceTracker::snapshot(std::uint64_t global_step, PolicyMode mode) const {
  if (all_returns_.empty()) throw Error(ErrorCode::kNoEpisodes, "snapshot of an empty tracker");
  const TopKQuery query{config_.fraction, 1};

  MetricsPoint p;
  p.global_step = global_step;
  p.policy_mode = mode;
  p.v_learned = learned_value(mode).value_or(std::numeric_limits<double>::quiet_NaN());
  p.v_best_single = top_store_.begin()->first.return_extrinsic;
  p.v_top5_ever = top_k_mean(return_values_, query);
  const std::vector<double> recent(recent_window_.begin(), recent_window_.end());
  p.v_top5_recent = top_k_mean(recent, query);
  p.initial_provisional = initial_returns_.size() < config_.initial_episodes;
  p.v_initial = mean_of(initial_returns_);
  p.gap_ever = p.v_top5_ever - p.v_learned;
  p.gap_recent = p.v_top5_recent - p.v_learned;
  return p;
}

}  // namespace expgap
