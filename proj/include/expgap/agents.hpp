#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "expgap/environments.hpp"
#include "expgap/rng.hpp"
#include "expgap/trajectory.hpp"

namespace expgap {

enum class AgentKind { kQLearning, kPolicyGradient };

std::string_view agent_kind_name(AgentKind kind);
AgentKind parse_agent_kind(std::string_view text);

struct AgentSpec {
  AgentKind kind = AgentKind::kQLearning;
  // Linear epsilon schedule over the first decay_fraction of training
  // episodes (q_learning only).
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  double epsilon_decay_fraction = 0.5;
  double learning_rate = 0.1;
  double gamma = 0.99;
  // Count-based exploration bonus beta / sqrt(N(s')); 0 disables it.
  double bonus_beta = 0.0;
  // Observations are binned as obs / aggregation_factor; 1 is exact tabular.
  std::uint32_t aggregation_factor = 1;
  std::int64_t seed = 0;

  bool operator==(const AgentSpec&) const = default;
};

void validate(const AgentSpec& spec);

// "q_learning", "policy_gradient", with a "_bonus" suffix when bonus_beta > 0.
std::string algorithm_name(const AgentSpec& spec);

double epsilon_at(const AgentSpec& spec, std::size_t episode_index, std::size_t total_episodes);

// Visit counts over binned states. Stand-in for a learned novelty model.
class BonusState {
 public:
  // Increments and returns the visit count of `binned`.
  std::uint64_t visit(Observation binned);
  std::uint64_t count(Observation binned) const;
  static double intrinsic_reward(double beta, std::uint64_t count);

 private:
  std::map<Observation, std::uint64_t> visit_counts_;
};

// Tabular agent. q_learning keeps Q-values and acts epsilon-greedily;
// policy_gradient keeps softmax preferences and applies REINFORCE with a
// running mean-return baseline at the end of each episode. Both learn from
// reward + intrinsic_reward.
class Agent {
 public:
  Agent(const AgentSpec& spec, int num_actions);

  // Greedy mode is argmax with ties to the lowest action id and neither
  // consumes randomness nor touches parameters.
  ActionId act(Observation observation, PolicyMode mode);

  void set_epsilon(double epsilon) { epsilon_ = epsilon; }
  double epsilon() const { return epsilon_; }

  void observe(Observation observation, const Transition& transition, Observation next_observation);

  Observation bin(Observation observation) const {
    return observation / static_cast<Observation>(spec_.aggregation_factor);
  }

  // Preferences (Q-values or logits) of the binned state; zeros when unseen.
  std::vector<double> preferences(Observation observation) const;
  void set_preferences(Observation observation, std::vector<double> values);

  // Digest of the preference table. All-zero rows are skipped, so rows that
  // were only default-initialized do not count as a change.
  std::string parameter_digest() const;

  const AgentSpec& spec() const { return spec_; }
  int num_actions() const { return num_actions_; }

 private:
  struct Step {
    Observation state;
    ActionId action;
    double reward;
  };

  std::vector<double>& row(Observation binned);
  ActionId argmax(Observation binned) const;
  std::vector<double> softmax(Observation binned) const;
  void finish_episode();

  AgentSpec spec_;
  int num_actions_;
  double epsilon_;
  Rng rng_;
  std::map<Observation, std::vector<double>> table_;
  std::vector<Step> episode_;
  double baseline_ = 0.0;
  std::uint64_t baseline_count_ = 0;
};

}  // namespace expgap
