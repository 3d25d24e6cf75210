#include "expgap/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "expgap/error.hpp"
#include "expgap/rng.hpp"

namespace expgap {

std::size_t top_k_count(std::size_t pool_size, const TopKQuery& q) {
  if (!(q.fraction > 0.0 && q.fraction <= 1.0)) {
    throw Error(ErrorCode::kInvalidSpec, "top-k fraction must lie in (0, 1]");
  }
  if (pool_size == 0) return 0;
  // A product within 1e-9 of an integer is snapped to it before the ceiling.
  const double scaled = q.fraction * static_cast<double>(pool_size);
  const double nearest = std::round(scaled);
  const double exact = std::abs(scaled - nearest) < 1e-9 * std::max(1.0, scaled) ? nearest : scaled;
  auto k = static_cast<std::size_t>(std::ceil(exact));
  k = std::max(k, std::max<std::size_t>(q.min_k, 1));
  return std::min(k, pool_size);
}

double top_k_mean(std::span<const double> returns, const TopKQuery& q) {
  if (returns.empty()) throw Error(ErrorCode::kEmptyPool, "top_k_mean over an empty pool");
  const std::size_t k = top_k_count(returns.size(), q);
  std::vector<double> pool(returns.begin(), returns.end());
  for (double v : pool) {
    if (std::isnan(v)) throw Error(ErrorCode::kNaNReward, "NaN return in top-k pool");
  }
  const auto kth = pool.begin() + static_cast<std::ptrdiff_t>(k);
  std::nth_element(pool.begin(), kth - 1, pool.end(), std::greater<>());
  std::sort(pool.begin(), kth, std::greater<>());
  return mean_of(std::span<const double>(pool.data(), k));
}

double mean_of(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::kEmptyPool, "mean over an empty pool");
  double mean = 0.0;
  double count = 0.0;
  for (double v : values) {
    count += 1.0;
    mean += (v - mean) / count;
  }
  return mean;
}

const EpisodeRecord& best_single(std::span<const EpisodeRecord> episodes) {
  if (episodes.empty()) throw Error(ErrorCode::kNoEpisodes, "best_single over no episodes");
  const EpisodeRecord* best = &episodes.front();
  for (const EpisodeRecord& e : episodes) {
    if (e.return_extrinsic > best->return_extrinsic ||
        (e.return_extrinsic == best->return_extrinsic && e.episode_id < best->episode_id)) {
      best = &e;
    }
  }
  return *best;
}

namespace {

EnvSpec episode_spec(const EnvSpec& env, const EpisodeRecord& episode) {
  EnvSpec spec = env;
  spec.seed = static_cast<std::int64_t>(episode.env_seed);
  return spec;
}

double open_loop_return(const EnvSpec& spec, const EpisodeRecord& episode) {
  Environment instance = Environment::reset(spec);
  double total = 0.0;
  for (ActionId a : episode.actions) {
    if (instance.terminal()) break;
    total += instance.step(a).reward;
  }
  return total;
}

}  // namespace

double replay_verify(const EnvSpec& env, const EpisodeRecord& episode) {
  if (episode.actions.empty()) {
    throw Error(ErrorCode::kEmptyEpisode, "episode " + std::to_string(episode.episode_id) + " has no actions");
  }
  const EnvSpec spec = episode_spec(env, episode);
  Environment instance = Environment::reset(spec);
  const bool strict = instance.deterministic();
  const bool have_rewards = episode.rewards.size() == episode.actions.size();

  std::vector<double> achieved;
  achieved.reserve(episode.actions.size());
  for (std::size_t i = 0; i < episode.actions.size(); ++i) {
    if (instance.terminal()) {
      throw ReplayError(ErrorCode::kEarlyTermination, i,
                        "environment ended after " + std::to_string(i) + " of " +
                            std::to_string(episode.actions.size()) + " recorded actions");
    }
    const StepResult r = instance.step(episode.actions[i]);
    achieved.push_back(r.reward);
    if (strict && have_rewards && r.reward != episode.rewards[i]) {
      throw ReplayError(ErrorCode::kDeterminismViolation, i,
                        "reward " + std::to_string(r.reward) + " differs from recorded " +
                            std::to_string(episode.rewards[i]));
    }
  }
  if (!instance.terminal()) {
    throw ReplayError(ErrorCode::kEarlyTermination, episode.actions.size(),
                      "environment still running after the recorded actions");
  }
  const double total = sum_in_order(achieved);
  if (strict && total != episode.return_extrinsic) {
    throw ReplayError(ErrorCode::kDeterminismViolation, episode.actions.size() - 1,
                      "replayed return " + std::to_string(total) + " differs from recorded " +
                          std::to_string(episode.return_extrinsic));
  }
  return total;
}

ReplaySummary replay_monte_carlo(const EnvSpec& env, const EpisodeRecord& episode,
                                 std::size_t replays, std::uint64_t stream_seed) {
  if (episode.actions.empty()) {
    throw Error(ErrorCode::kEmptyEpisode, "episode " + std::to_string(episode.episode_id) + " has no actions");
  }
  if (replays == 0) throw Error(ErrorCode::kEmptyInput, "replay count must be positive");
  ReplaySummary summary;
  summary.replays = replays;
  summary.recorded = episode.return_extrinsic;
  summary.min = INFINITY;
  summary.max = -INFINITY;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < replays; ++i) {
    EnvSpec spec = env;
    spec.seed = static_cast<std::int64_t>(derive_seed(stream_seed, i));
    const double r = open_loop_return(spec, episode);
    sum += r;
    sum_sq += r * r;
    summary.min = std::min(summary.min, r);
    summary.max = std::max(summary.max, r);
  }
  const double n = static_cast<double>(replays);
  summary.mean = sum / n;
  summary.stddev = replays > 1 ? std::sqrt(std::max(0.0, (sum_sq - n * summary.mean * summary.mean) / (n - 1))) : 0.0;
  return summary;
}

double heuristic_optimal_bound(double r_max, double gamma) {
  if (!(gamma >= 0.0 && gamma < 1.0)) {
    throw Error(ErrorCode::kInvalidGamma, "gamma must lie in [0, 1), got " + std::to_string(gamma));
  }
  return r_max / (1.0 - gamma);
}

}  // namespace expgap
