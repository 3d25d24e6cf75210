#include "expgap/environments.hpp"

#include <bit>
#include <cmath>
#include <functional>
#include <vector>

#include "expgap/error.hpp"

namespace expgap {

namespace {

constexpr std::uint32_t kMaxInvaderColumns = 16;

std::uint32_t initial_formation(std::uint32_t columns) {
  std::uint32_t mask = 0;
  for (std::uint32_t c = 0; c < columns; c += 2) mask |= 1u << c;
  return mask;
}

double rollout(const EnvSpec& spec, const std::vector<ActionId>& actions) {
  Environment env = Environment::reset(spec);
  double total = 0.0;
  for (ActionId a : actions) {
    if (env.terminal()) break;
    total += env.step(a).reward;
  }
  return total;
}

}  // namespace

std::string_view env_kind_name(EnvKind kind) {
  switch (kind) {
    case EnvKind::kDeepSea: return "deep_sea";
    case EnvKind::kKeyCorridor: return "key_corridor";
    case EnvKind::kDenseGrid: return "dense_grid";
    case EnvKind::kMiniInvaders: return "mini_invaders";
  }
  return "unknown";
}

EnvKind parse_env_kind(std::string_view text) {
  if (text == "deep_sea") return EnvKind::kDeepSea;
  if (text == "key_corridor") return EnvKind::kKeyCorridor;
  if (text == "dense_grid") return EnvKind::kDenseGrid;
  if (text == "mini_invaders") return EnvKind::kMiniInvaders;
  throw Error(ErrorCode::kInvalidSpec, "unknown environment '" + std::string(text) + "'");
}

std::uint32_t default_max_steps(EnvKind kind, std::uint32_t size) {
  switch (kind) {
    case EnvKind::kDeepSea: return size;
    case EnvKind::kKeyCorridor: return 4 * size;
    case EnvKind::kDenseGrid: return 4 * size;
    case EnvKind::kMiniInvaders: return 64;
  }
  return size;
}

std::uint32_t effective_max_steps(const EnvSpec& spec) {
  return spec.max_steps == 0 ? default_max_steps(spec.kind, spec.size) : spec.max_steps;
}

void validate(const EnvSpec& spec) {
  if (spec.size == 0) throw Error(ErrorCode::kInvalidSpec, "size must be positive");
  if (!(spec.stochastic_slip >= 0.0 && spec.stochastic_slip < 1.0)) {
    throw Error(ErrorCode::kInvalidSpec, "stochastic_slip must lie in [0, 1)");
  }
  switch (spec.kind) {
    case EnvKind::kKeyCorridor:
      if (spec.size < 3) throw Error(ErrorCode::kInvalidSpec, "key_corridor needs size >= 3");
      break;
    case EnvKind::kDenseGrid:
      if (spec.size < 2) throw Error(ErrorCode::kInvalidSpec, "dense_grid needs size >= 2");
      break;
    case EnvKind::kMiniInvaders:
      if (spec.size < 2 || spec.size > kMaxInvaderColumns) {
        throw Error(ErrorCode::kInvalidSpec, "mini_invaders needs 2 <= size <= 16");
      }
      break;
    case EnvKind::kDeepSea:
      break;
  }
}

Environment::Environment(const EnvSpec& spec)
    : spec_(spec), max_steps_(effective_max_steps(spec)) {
  if (spec.stochastic_slip > 0.0) slip_rng_.emplace(mix_seed(static_cast<std::uint64_t>(spec.seed)));
  switch (spec.kind) {
    case EnvKind::kKeyCorridor:
      col_ = spec.size - 2;
      break;
    case EnvKind::kMiniInvaders:
      alive_ = initial_formation(spec.size);
      break;
    case EnvKind::kDeepSea:
    case EnvKind::kDenseGrid:
      break;
  }
}

Environment Environment::reset(const EnvSpec& spec) {
  validate(spec);
  return Environment(spec);
}

int Environment::num_actions() const {
  switch (spec_.kind) {
    case EnvKind::kDeepSea:
    case EnvKind::kKeyCorridor:
      return 2;
    case EnvKind::kDenseGrid:
      return 4;
    case EnvKind::kMiniInvaders:
      return 3;
  }
  return 0;
}

Observation Environment::observation() const {
  const auto n = static_cast<Observation>(spec_.size);
  switch (spec_.kind) {
    case EnvKind::kDeepSea:
      return static_cast<Observation>(row_) * (n + 1) + col_;
    case EnvKind::kKeyCorridor:
      return static_cast<Observation>(col_) + (has_key_ ? n : 0);
    case EnvKind::kDenseGrid:
      return static_cast<Observation>(row_) * n + col_;
    case EnvKind::kMiniInvaders:
      return static_cast<Observation>(col_) + n * (shift_ + n * static_cast<Observation>(alive_));
  }
  return 0;
}

double Environment::apply(ActionId action, bool& done) {
  const std::uint32_t n = spec_.size;
  switch (spec_.kind) {
    case EnvKind::kDeepSea: {
      double reward = 0.0;
      if (action == 1) {
        reward -= 0.01 / static_cast<double>(n);
        if (col_ < n) ++col_;
      } else if (col_ > 0) {
        --col_;
      }
      ++row_;
      if (row_ == n) {
        done = true;
        if (col_ == n) reward += 1.0;
      }
      return reward;
    }
    case EnvKind::kKeyCorridor: {
      if (action == 1) {
        ++col_;
      } else if (col_ > 0) {
        --col_;
      }
      if (col_ == 0) has_key_ = true;
      if (col_ == n - 1) {
        done = true;
        return has_key_ ? 1.0 : 0.0;
      }
      return 0.0;
    }
    case EnvKind::kDenseGrid: {
      const auto distance = [&] { return 2 * (n - 1) - row_ - col_; };
      const std::uint32_t before = distance();
      switch (action) {
        case 0: if (row_ > 0) --row_; break;
        case 1: if (row_ + 1 < n) ++row_; break;
        case 2: if (col_ > 0) --col_; break;
        default: if (col_ + 1 < n) ++col_; break;
      }
      const std::uint32_t after = distance();
      if (after == 0) done = true;
      return (static_cast<double>(before) - static_cast<double>(after)) /
             static_cast<double>(2 * (n - 1));
    }
    case EnvKind::kMiniInvaders: {
      double reward = 0.0;
      if (action == 0) {
        if (col_ > 0) --col_;
      } else if (action == 1) {
        if (col_ + 1 < n) ++col_;
      } else {
        // Alien j sits in column (j + shift) mod n.
        const std::uint32_t slot = (col_ + n - shift_) % n;
        if (alive_ & (1u << slot)) {
          alive_ &= ~(1u << slot);
          reward = 1.0;
        }
      }
      shift_ = (shift_ + 1) % n;
      if (alive_ == 0) done = true;
      return reward;
    }
  }
  return 0.0;
}

StepResult Environment::step(ActionId action) {
  if (terminal_) throw Error(ErrorCode::kSteppedTerminal, "step() called on a finished episode");
  if (action < 0 || action >= num_actions()) {
    throw Error(ErrorCode::kInvalidAction, "action " + std::to_string(action) + " out of range");
  }
  ActionId executed = action;
  if (slip_rng_) {
    const bool slip = slip_rng_->bernoulli(spec_.stochastic_slip);
    if (slip && prev_action_) executed = *prev_action_;
  }
  prev_action_ = executed;

  StepResult result;
  result.reward = apply(executed, result.done);
  ++t_;
  if (!result.done && t_ >= max_steps_) result.truncated = true;
  terminal_ = result.done || result.truncated;
  result.observation = observation();
  return result;
}

double optimal_return(const EnvSpec& spec) {
  validate(spec);
  if (spec.stochastic_slip != 0.0) {
    throw Error(ErrorCode::kInvalidSpec, "optimal_return needs a deterministic spec");
  }
  const std::uint32_t n = spec.size;
  const std::uint32_t horizon = effective_max_steps(spec);
  switch (spec.kind) {
    case EnvKind::kDeepSea:
      // Only the all-right sequence reaches the treasure; an episode cut short
      // by max_steps never pays, and left-only is then optimal.
      if (horizon < n) return 0.0;
      return rollout(spec, std::vector<ActionId>(n, 1));
    case EnvKind::kKeyCorridor:
      return horizon >= 2 * n - 3 ? 1.0 : 0.0;
    case EnvKind::kDenseGrid: {
      if (horizon < 2 * (n - 1)) {
        throw Error(ErrorCode::kTooLargeToEnumerate, "dense_grid horizon shorter than the goal distance");
      }
      std::vector<ActionId> path(n - 1, 1);
      path.insert(path.end(), n - 1, 3);
      return rollout(spec, path);
    }
    case EnvKind::kMiniInvaders:
      break;
  }

  Environment root = Environment::reset(spec);
  if (std::pow(static_cast<double>(root.num_actions()), horizon) > kMaxEnumeratedSequences) {
    throw Error(ErrorCode::kTooLargeToEnumerate,
                "action-sequence space exceeds " + std::to_string(kMaxEnumeratedSequences));
  }
  double best = -INFINITY;
  std::function<void(const Environment&, double)> search = [&](const Environment& env, double acc) {
    for (ActionId a = 0; a < env.num_actions(); ++a) {
      Environment next = env;
      const StepResult r = next.step(a);
      const double total = acc + r.reward;
      if (next.terminal()) {
        best = std::max(best, total);
      } else {
        search(next, total);
      }
    }
  };
  search(root, 0.0);
  return best;
}

}  // namespace expgap
