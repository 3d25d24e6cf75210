#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "expgap/rng.hpp"
#include "expgap/trajectory.hpp"

namespace expgap {

enum class EnvKind { kDeepSea, kKeyCorridor, kDenseGrid, kMiniInvaders };

std::string_view env_kind_name(EnvKind kind);
EnvKind parse_env_kind(std::string_view text);

using Observation = std::int64_t;

struct EnvSpec {
  EnvKind kind = EnvKind::kDeepSea;
  std::uint32_t size = 8;
  // Sticky-action probability; 0 means deterministic.
  double stochastic_slip = 0.0;
  // 0 selects the per-environment default (see default_max_steps).
  std::uint32_t max_steps = 0;
  std::int64_t seed = 0;

  bool operator==(const EnvSpec&) const = default;
};

std::uint32_t default_max_steps(EnvKind kind, std::uint32_t size);
std::uint32_t effective_max_steps(const EnvSpec& spec);

// Throws InvalidSpec.
void validate(const EnvSpec& spec);

struct StepResult {
  Observation observation = 0;
  double reward = 0.0;
  bool done = false;
  bool truncated = false;
};

// Small tabular environments. Value type: copying an instance forks the full
// state including the sticky-action stream, which is what enumeration relies on.
//
//   deep_sea      depth N, actions {0: left, 1: right}. Every right costs
//                 0.01/N; ending the N-th step in column N pays +1, and only
//                 the all-right sequence gets there. Optimum 0.99.
//   key_corridor  cells 0..N-1, start at N-2, key at 0, door at N-1. Entering
//                 the door ends the episode and pays +1 only if the key was
//                 picked up. Actions {0: left, 1: right}.
//   dense_grid    N x N grid from (0,0) to (N-1,N-1), actions {up, down, left,
//                 right}. Reward per step is the Manhattan progress divided by
//                 the start distance, so any path reaching the goal earns 1.
//   mini_invaders cannon on a row of N columns under a cyclically drifting
//                 formation of aliens (even columns at t=0). Actions {left,
//                 right, fire}; firing under an alien pays +1 and removes it.
class Environment {
 public:
  static Environment reset(const EnvSpec& spec);

  StepResult step(ActionId action);

  Observation observation() const;
  int num_actions() const;
  bool deterministic() const { return spec_.stochastic_slip == 0.0; }
  bool terminal() const { return terminal_; }
  std::uint32_t steps_taken() const { return t_; }
  const EnvSpec& spec() const { return spec_; }

 private:
  explicit Environment(const EnvSpec& spec);

  double apply(ActionId action, bool& done);

  EnvSpec spec_;
  std::uint32_t max_steps_;
  std::uint32_t t_ = 0;
  bool terminal_ = false;
  std::optional<ActionId> prev_action_;
  std::optional<Rng> slip_rng_;

  // deep_sea: row/col. dense_grid: row/col. key_corridor: col + has_key.
  // mini_invaders: col (cannon), shift, alive.
  std::uint32_t row_ = 0;
  std::uint32_t col_ = 0;
  bool has_key_ = false;
  std::uint32_t shift_ = 0;
  std::uint32_t alive_ = 0;
};

// Exact optimal undiscounted return of a deterministic spec. Closed form for
// deep_sea, key_corridor and dense_grid; exhaustive search for mini_invaders,
// capped at 1e7 action sequences (TooLargeToEnumerate beyond that).
double optimal_return(const EnvSpec& spec);

inline constexpr double kMaxEnumeratedSequences = 1e7;

}  // namespace expgap
