#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "expgap/agents.hpp"
#include "expgap/curves.hpp"
#include "expgap/environments.hpp"
#include "expgap/experience_tracker.hpp"
#include "expgap/trajectory.hpp"

namespace expgap {

struct ExperimentOptions {
  std::size_t n_episodes = 1000;
  std::size_t eval_every = 50;
  bool greedy_eval = true;
  std::size_t eval_episodes = 1;
  TrackerConfig tracker;
};

struct RunLog {
  RunIdentity identity;
  std::vector<EpisodeRecord> episodes;
  std::vector<MetricsPoint> metrics;
  std::vector<CurveRow> curve;
};

// Trains `agent` for n_episodes episodes. After every eval_every training
// episodes (and once more after the last one when it is not a multiple), runs
// eval_episodes greedy episodes that are logged but never learned from. Episode
// ids run 0,1,2,... across both kinds; global_step counts training steps only.
// The run seed is env.seed; identical specs give identical logs.
RunLog run_experiment(const EnvSpec& env, const AgentSpec& agent, const ExperimentOptions& options,
                      const std::string& config_digest = "");

// Builds the curve of an episode stream exactly as run_experiment does.
CurveBuilder replay_curve(const std::vector<EpisodeRecord>& episodes, const TrackerConfig& tracker,
                          std::size_t eval_every, std::int64_t seed);

}  // namespace expgap
