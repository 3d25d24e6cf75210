#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "expgap/environments.hpp"
#include "expgap/trajectory.hpp"

namespace expgap {

// Top-k selection rule: k = max(min_k, ceil(fraction * N)), clamped to N.
struct TopKQuery {
  double fraction = 0.05;
  std::size_t min_k = 1;
};

std::size_t top_k_count(std::size_t pool_size, const TopKQuery& q = {});

// Running mean m_i = m_{i-1} + (x_i - m_{i-1}) / i. A constant sequence
// yields that constant exactly, and over a descending sequence the result never
// exceeds the first element. Throws EmptyPool.
double mean_of(std::span<const double> values);

// Mean (mean_of) of the k largest returns taken in descending order, so the
// result is independent of input order bit for bit. Throws EmptyPool.
double top_k_mean(std::span<const double> returns, const TopKQuery& q = {});

// Highest-return episode; ties go to the lowest episode_id. Throws NoEpisodes.
const EpisodeRecord& best_single(std::span<const EpisodeRecord> episodes);

// Re-executes episode.actions in a fresh environment reset with
// episode.env_seed and returns the achieved extrinsic return. For
// deterministic environments a mismatch with the recorded per-step rewards or
// return raises DeterminismViolation (ReplayError carries the step); an episode
// that ends at a different step raises EarlyTermination.
double replay_verify(const EnvSpec& env, const EpisodeRecord& episode);

struct ReplaySummary {
  std::size_t replays = 0;
  double recorded = 0.0;
  double mean = 0.0;
  double stddev = 0.0;
  double min = 0.0;
  double max = 0.0;
};

// Open-loop replay of the action sequence in a stochastic environment,
// each replay with its own slip stream derived from stream_seed. Reports the
// distribution only; no equality is asserted.
ReplaySummary replay_monte_carlo(const EnvSpec& env, const EpisodeRecord& episode,
                                 std::size_t replays, std::uint64_t stream_seed);

// r_max / (1 - gamma). Throws InvalidGamma unless 0 <= gamma < 1.
double heuristic_optimal_bound(double r_max, double gamma);

}  // namespace expgap
