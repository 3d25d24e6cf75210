#include "expgap/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "expgap/curves.hpp"
#include "expgap/error.hpp"

namespace expgap {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(std::size_t line, const std::string& message) {
  throw Error(ErrorCode::kConfigError, "line " + std::to_string(line) + ": " + message);
}

template <typename T>
T parse_integer(std::string_view value, std::size_t line) {
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    fail(line, "expected an integer, got '" + std::string(value) + "'");
  }
  return out;
}

double parse_real(std::string_view value, std::size_t line) {
  const std::string text(value);
  char* end = nullptr;
  const double out = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size()) fail(line, "expected a number, got '" + text + "'");
  return out;
}

bool parse_bool(std::string_view value, std::size_t line) {
  if (value == "true") return true;
  if (value == "false") return false;
  fail(line, "expected true or false, got '" + std::string(value) + "'");
}

}  // namespace

RunConfig parse_config(std::string_view text) {
  RunConfig c;
  std::string section;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(line_no, "malformed section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (section != "env" && section != "agent" && section != "tracker" && section != "run") {
        fail(line_no, "unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail(line_no, "expected key = value");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (section.empty()) fail(line_no, "key '" + key + "' outside of a section");

    try {
      if (section == "env") {
        if (key == "name") c.env.kind = parse_env_kind(value);
        else if (key == "size") c.env.size = parse_integer<std::uint32_t>(value, line_no);
        else if (key == "stochastic_slip") c.env.stochastic_slip = parse_real(value, line_no);
        else if (key == "max_steps") c.env.max_steps = parse_integer<std::uint32_t>(value, line_no);
        else fail(line_no, "unknown key env." + key);
      } else if (section == "agent") {
        if (key == "kind") c.agent.kind = parse_agent_kind(value);
        else if (key == "epsilon_start") c.agent.epsilon_start = parse_real(value, line_no);
        else if (key == "epsilon_end") c.agent.epsilon_end = parse_real(value, line_no);
        else if (key == "epsilon_decay_fraction") c.agent.epsilon_decay_fraction = parse_real(value, line_no);
        else if (key == "learning_rate") c.agent.learning_rate = parse_real(value, line_no);
        else if (key == "gamma") c.agent.gamma = parse_real(value, line_no);
        else if (key == "bonus_beta") c.agent.bonus_beta = parse_real(value, line_no);
        else if (key == "aggregation_factor") c.agent.aggregation_factor = parse_integer<std::uint32_t>(value, line_no);
        else fail(line_no, "unknown key agent." + key);
      } else if (section == "tracker") {
        if (key == "recent_window") c.tracker.recent_window = parse_integer<std::size_t>(value, line_no);
        else if (key == "eval_window") c.tracker.eval_window = parse_integer<std::size_t>(value, line_no);
        else if (key == "top_capacity") c.tracker.top_capacity = parse_integer<std::size_t>(value, line_no);
        else if (key == "initial_episodes") c.tracker.initial_episodes = parse_integer<std::size_t>(value, line_no);
        else if (key == "fraction") c.tracker.fraction = parse_real(value, line_no);
        else fail(line_no, "unknown key tracker." + key);
      } else {
        if (key == "n_episodes") c.n_episodes = parse_integer<std::size_t>(value, line_no);
        else if (key == "eval_every") c.eval_every = parse_integer<std::size_t>(value, line_no);
        else if (key == "greedy_eval") c.greedy_eval = parse_bool(value, line_no);
        else if (key == "eval_episodes") c.eval_episodes = parse_integer<std::size_t>(value, line_no);
        else if (key == "output_dir") c.output_dir = std::string(value);
        else if (key == "seeds") {
          c.seeds.clear();
          std::size_t start = 0;
          while (start <= value.size()) {
            const auto comma = value.find(',', start);
            const auto item = trim(value.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
            c.seeds.push_back(parse_integer<std::int64_t>(item, line_no));
            if (comma == std::string_view::npos) break;
            start = comma + 1;
          }
        } else {
          fail(line_no, "unknown key run." + key);
        }
      }
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kConfigError) throw;
      fail(line_no, e.what());
    }
  }

  if (c.seeds.empty()) throw Error(ErrorCode::kConfigError, "run.seeds must not be empty");
  if (c.n_episodes == 0) throw Error(ErrorCode::kConfigError, "run.n_episodes must be positive");
  if (c.eval_every == 0) throw Error(ErrorCode::kConfigError, "run.eval_every must be positive");
  try {
    validate(c.env);
    validate(c.agent);
    validate(c.tracker);
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfigError, e.what());
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string render_config(const RunConfig& c) {
  std::ostringstream out;
  out << "[env]\n"
      << "name = " << env_kind_name(c.env.kind) << '\n'
      << "size = " << c.env.size << '\n'
      << "stochastic_slip = " << format_double(c.env.stochastic_slip) << '\n'
      << "max_steps = " << c.env.max_steps << '\n'
      << "\n[agent]\n"
      << "kind = " << agent_kind_name(c.agent.kind) << '\n'
      << "epsilon_start = " << format_double(c.agent.epsilon_start) << '\n'
      << "epsilon_end = " << format_double(c.agent.epsilon_end) << '\n'
      << "epsilon_decay_fraction = " << format_double(c.agent.epsilon_decay_fraction) << '\n'
      << "learning_rate = " << format_double(c.agent.learning_rate) << '\n'
      << "gamma = " << format_double(c.agent.gamma) << '\n'
      << "bonus_beta = " << format_double(c.agent.bonus_beta) << '\n'
      << "aggregation_factor = " << c.agent.aggregation_factor << '\n'
      << "\n[tracker]\n"
      << "recent_window = " << c.tracker.recent_window << '\n'
      << "eval_window = " << c.tracker.eval_window << '\n'
      << "top_capacity = " << c.tracker.top_capacity << '\n'
      << "initial_episodes = " << c.tracker.initial_episodes << '\n'
      << "fraction = " << format_double(c.tracker.fraction) << '\n'
      << "\n[run]\n"
      << "n_episodes = " << c.n_episodes << '\n'
      << "eval_every = " << c.eval_every << '\n'
      << "greedy_eval = " << (c.greedy_eval ? "true" : "false") << '\n'
      << "eval_episodes = " << c.eval_episodes << '\n'
      << "seeds = ";
  for (std::size_t i = 0; i < c.seeds.size(); ++i) out << (i ? ", " : "") << c.seeds[i];
  out << '\n' << "output_dir = " << c.output_dir.string() << '\n';
  return out.str();
}

std::string config_digest(const RunConfig& config) {
  RunConfig located_nowhere = config;
  located_nowhere.output_dir.clear();
  return stable_digest(render_config(located_nowhere));
}

EnvSpec env_for_seed(const RunConfig& config, std::int64_t seed) {
  EnvSpec spec = config.env;
  spec.seed = seed;
  return spec;
}

AgentSpec agent_for_seed(const RunConfig& config, std::int64_t seed) {
  AgentSpec spec = config.agent;
  spec.seed = seed;
  return spec;
}

}  // namespace expgap
