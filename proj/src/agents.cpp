#include "expgap/agents.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "expgap/error.hpp"

namespace expgap {

std::string_view agent_kind_name(AgentKind kind) {
  return kind == AgentKind::kPolicyGradient ? "policy_gradient" : "q_learning";
}

AgentKind parse_agent_kind(std::string_view text) {
  if (text == "q_learning") return AgentKind::kQLearning;
  if (text == "policy_gradient") return AgentKind::kPolicyGradient;
  throw Error(ErrorCode::kInvalidSpec, "unknown agent kind '" + std::string(text) + "'");
}

void validate(const AgentSpec& spec) {
  const auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in_unit(spec.epsilon_start) || !in_unit(spec.epsilon_end)) {
    throw Error(ErrorCode::kInvalidSpec, "epsilon schedule endpoints must lie in [0, 1]");
  }
  if (!(spec.epsilon_decay_fraction > 0.0 && spec.epsilon_decay_fraction <= 1.0)) {
    throw Error(ErrorCode::kInvalidSpec, "epsilon_decay_fraction must lie in (0, 1]");
  }
  if (!(spec.learning_rate >= 0.0)) throw Error(ErrorCode::kInvalidSpec, "learning_rate must be >= 0");
  if (!(spec.gamma >= 0.0 && spec.gamma < 1.0)) throw Error(ErrorCode::kInvalidSpec, "gamma must lie in [0, 1)");
  if (!(spec.bonus_beta >= 0.0)) throw Error(ErrorCode::kInvalidSpec, "bonus_beta must be >= 0");
  if (spec.aggregation_factor == 0) throw Error(ErrorCode::kInvalidSpec, "aggregation_factor must be >= 1");
}

std::string algorithm_name(const AgentSpec& spec) {
  std::string name(agent_kind_name(spec.kind));
  if (spec.bonus_beta > 0.0) name += "_bonus";
  return name;
}

double epsilon_at(const AgentSpec& spec, std::size_t episode_index, std::size_t total_episodes) {
  const double horizon = spec.epsilon_decay_fraction * static_cast<double>(total_episodes);
  if (horizon <= 0.0) return spec.epsilon_end;
  const double progress = std::min(1.0, static_cast<double>(episode_index) / horizon);
  return spec.epsilon_start + (spec.epsilon_end - spec.epsilon_start) * progress;
}

std::uint64_t BonusState::visit(Observation binned) { return ++visit_counts_[binned]; }

std::uint64_t BonusState::count(Observation binned) const {
  const auto it = visit_counts_.find(binned);
  return it == visit_counts_.end() ? 0 : it->second;
}

double BonusState::intrinsic_reward(double beta, std::uint64_t count) {
  if (beta == 0.0 || count == 0) return 0.0;
  return beta / std::sqrt(static_cast<double>(count));
}

Agent::Agent(const AgentSpec& spec, int num_actions)
    : spec_(spec),
      num_actions_(num_actions),
      epsilon_(spec.epsilon_start),
      rng_(derive_seed(static_cast<std::uint64_t>(spec.seed), 0xA6E1)) {
  validate(spec_);
  if (num_actions_ <= 0) throw Error(ErrorCode::kInvalidSpec, "agent needs at least one action");
}

std::vector<double>& Agent::row(Observation binned) {
  auto [it, inserted] = table_.try_emplace(binned);
  if (inserted) it->second.assign(static_cast<std::size_t>(num_actions_), 0.0);
  return it->second;
}

std::vector<double> Agent::preferences(Observation observation) const {
  const auto it = table_.find(bin(observation));
  if (it == table_.end()) return std::vector<double>(static_cast<std::size_t>(num_actions_), 0.0);
  return it->second;
}

void Agent::set_preferences(Observation observation, std::vector<double> values) {
  if (values.size() != static_cast<std::size_t>(num_actions_)) {
    throw Error(ErrorCode::kInvalidSpec, "preference row has the wrong number of actions");
  }
  table_[bin(observation)] = std::move(values);
}

ActionId Agent::argmax(Observation binned) const {
  const auto it = table_.find(binned);
  if (it == table_.end()) return 0;
  const auto& prefs = it->second;
  return static_cast<ActionId>(std::max_element(prefs.begin(), prefs.end()) - prefs.begin());
}

std::vector<double> Agent::softmax(Observation binned) const {
  std::vector<double> probs(static_cast<std::size_t>(num_actions_), 0.0);
  const auto it = table_.find(binned);
  if (it == table_.end()) {
    std::fill(probs.begin(), probs.end(), 1.0 / num_actions_);
    return probs;
  }
  const auto& prefs = it->second;
  const double peak = *std::max_element(prefs.begin(), prefs.end());
  double total = 0.0;
  for (std::size_t a = 0; a < probs.size(); ++a) {
    probs[a] = std::exp(prefs[a] - peak);
    total += probs[a];
  }
  for (double& p : probs) p /= total;
  return probs;
}

ActionId Agent::act(Observation observation, PolicyMode mode) {
  const Observation s = bin(observation);
  if (mode == PolicyMode::kGreedy) return argmax(s);
  if (spec_.kind == AgentKind::kQLearning) {
    if (rng_.uniform() < epsilon_) return static_cast<ActionId>(rng_.below(static_cast<std::uint64_t>(num_actions_)));
    return argmax(s);
  }
  const std::vector<double> probs = softmax(s);
  const double u = rng_.uniform();
  double cumulative = 0.0;
  for (std::size_t a = 0; a < probs.size(); ++a) {
    cumulative += probs[a];
    if (u < cumulative) return static_cast<ActionId>(a);
  }
  return static_cast<ActionId>(probs.size() - 1);
}

void Agent::observe(Observation observation, const Transition& transition, Observation next_observation) {
  const Observation s = bin(observation);
  const double reward = transition.reward + transition.intrinsic_reward;
  if (spec_.kind == AgentKind::kQLearning) {
    double target = reward;
    if (!transition.done) {
      const auto next = table_.find(bin(next_observation));
      const double best_next =
          next == table_.end() ? 0.0 : *std::max_element(next->second.begin(), next->second.end());
      target += spec_.gamma * best_next;
    }
    auto& q = row(s)[static_cast<std::size_t>(transition.action)];
    q += spec_.learning_rate * (target - q);
    return;
  }
  episode_.push_back({s, transition.action, reward});
  if (transition.done || transition.truncated) finish_episode();
}

void Agent::finish_episode() {
  std::vector<double> returns(episode_.size());
  double running = 0.0;
  for (std::size_t i = episode_.size(); i-- > 0;) {
    running = episode_[i].reward + spec_.gamma * running;
    returns[i] = running;
  }
  const double baseline = baseline_;
  for (std::size_t i = 0; i < episode_.size(); ++i) {
    const Step& step = episode_[i];
    const std::vector<double> probs = softmax(step.state);
    auto& prefs = row(step.state);
    const double advantage = returns[i] - baseline;
    for (std::size_t a = 0; a < prefs.size(); ++a) {
      const double indicator = static_cast<ActionId>(a) == step.action ? 1.0 : 0.0;
      prefs[a] += spec_.learning_rate * advantage * (indicator - probs[a]);
    }
  }
  if (!returns.empty()) {
    ++baseline_count_;
    baseline_ += (returns.front() - baseline_) / static_cast<double>(baseline_count_);
  }
  episode_.clear();
}

std::string Agent::parameter_digest() const {
  std::string bytes;
  for (const auto& [state, prefs] : table_) {
    if (std::all_of(prefs.begin(), prefs.end(), [](double v) { return v == 0.0; })) continue;
    bytes.append(reinterpret_cast<const char*>(&state), sizeof(state));
    for (double v : prefs) {
      std::uint64_t bits;
      std::memcpy(&bits, &v, sizeof(bits));
      bytes.append(reinterpret_cast<const char*>(&bits), sizeof(bits));
    }
  }
  return stable_digest(bytes);
}

}  // namespace expgap
