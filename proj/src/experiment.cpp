#include "expgap/experiment.hpp"

#include "expgap/error.hpp"

namespace expgap {

namespace {

struct EpisodeOutcome {
  std::vector<Transition> transitions;
  std::size_t steps = 0;
};

EpisodeOutcome play(const EnvSpec& spec, Agent& agent, BonusState* bonus, PolicyMode mode) {
  Environment env = Environment::reset(spec);
  EpisodeOutcome out;
  Observation obs = env.observation();
  while (!env.terminal()) {
    const ActionId action = agent.act(obs, mode);
    const StepResult r = env.step(action);
    Transition t;
    t.step_index = static_cast<std::uint32_t>(out.transitions.size());
    t.action = action;
    t.reward = r.reward;
    t.done = r.done;
    t.truncated = r.truncated;
    if (mode == PolicyMode::kStochastic) {
      if (bonus != nullptr) {
        const std::uint64_t n = bonus->visit(agent.bin(r.observation));
        t.intrinsic_reward = BonusState::intrinsic_reward(agent.spec().bonus_beta, n);
      }
      agent.observe(obs, t, r.observation);
    }
    out.transitions.push_back(t);
    obs = r.observation;
  }
  out.steps = out.transitions.size();
  return out;
}

}  // namespace

CurveBuilder replay_curve(const std::vector<EpisodeRecord>& episodes, const TrackerConfig& tracker,
                          std::size_t eval_every, std::int64_t seed) {
  CurveBuilder builder(tracker, eval_every, seed);
  for (const EpisodeRecord& e : episodes) builder.add(e);
  builder.finish();
  return builder;
}

RunLog run_experiment(const EnvSpec& env, const AgentSpec& agent_spec, const ExperimentOptions& options,
                      const std::string& config_digest) {
  validate(env);
  validate(agent_spec);
  validate(options.tracker);
  if (options.eval_every == 0) throw Error(ErrorCode::kInvalidSpec, "eval_every must be positive");

  RunLog log;
  log.identity.algorithm_name = algorithm_name(agent_spec);
  log.identity.env_name = std::string(env_kind_name(env.kind));
  log.identity.seed = env.seed;
  log.identity.config_digest = config_digest;

  Agent agent(agent_spec, Environment::reset(env).num_actions());
  BonusState bonus;
  BonusState* bonus_ptr = agent_spec.bonus_beta > 0.0 ? &bonus : nullptr;
  CurveBuilder curve(options.tracker, options.eval_every, env.seed);

  EpisodeId next_id = 0;
  std::uint64_t global_step = 0;
  const auto run_one = [&](PolicyMode mode) {
    EnvSpec spec = env;
    spec.seed = static_cast<std::int64_t>(episode_env_seed(env.seed, next_id));
    EpisodeOutcome outcome = play(spec, agent, mode == PolicyMode::kStochastic ? bonus_ptr : nullptr, mode);
    if (mode == PolicyMode::kStochastic) global_step += outcome.steps;
    EpisodeRecord record = finalize_episode(outcome.transitions, log.identity, mode, next_id, global_step);
    ++next_id;
    curve.add(record);
    log.episodes.push_back(std::move(record));
  };
  const auto evaluate = [&] {
    if (!options.greedy_eval) return;
    for (std::size_t i = 0; i < options.eval_episodes; ++i) run_one(PolicyMode::kGreedy);
  };

  for (std::size_t episode = 0; episode < options.n_episodes; ++episode) {
    agent.set_epsilon(epsilon_at(agent_spec, episode, options.n_episodes));
    run_one(PolicyMode::kStochastic);
    const bool boundary = (episode + 1) % options.eval_every == 0;
    if (boundary || episode + 1 == options.n_episodes) evaluate();
  }
  curve.finish();
  log.metrics = curve.metrics();
  log.curve = curve.rows();
  return log;
}

}  // namespace expgap
