#include "expgap/log_io.hpp"

#include <zlib.h>

#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "expgap/error.hpp"
#include "json.hpp"

namespace expgap {

using ordered_json = nlohmann::ordered_json;

namespace {

bool ends_with_gz(const std::filesystem::path& path) { return path.extension() == ".gz"; }

const ordered_json& require(const ordered_json& obj, const char* key, std::size_t line) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(line, key, "missing");
  return *it;
}

std::uint64_t require_unsigned(const ordered_json& obj, const char* key, std::size_t line) {
  const ordered_json& v = require(obj, key, line);
  if (!v.is_number_unsigned()) throw SchemaError(line, key, "expected a non-negative integer");
  return v.get<std::uint64_t>();
}

std::int64_t require_integer(const ordered_json& obj, const char* key, std::size_t line) {
  const ordered_json& v = require(obj, key, line);
  if (!v.is_number_integer()) throw SchemaError(line, key, "expected an integer");
  if (v.is_number_unsigned() && v.get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX)) {
    throw SchemaError(line, key, "integer out of range");
  }
  return v.get<std::int64_t>();
}

std::string require_string(const ordered_json& obj, const char* key, std::size_t line) {
  const ordered_json& v = require(obj, key, line);
  if (!v.is_string()) throw SchemaError(line, key, "expected a string");
  return v.get<std::string>();
}

double finite_number(const ordered_json& v, const char* key, std::size_t line) {
  if (!v.is_number()) throw SchemaError(line, key, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw SchemaError(line, key, "non-finite value", ErrorCode::kNaNReward);
  return d;
}

bool mentions_non_finite(std::string_view line) {
  return line.find("NaN") != std::string_view::npos || line.find("Infinity") != std::string_view::npos;
}

}  // namespace

std::string format_log_line(const EpisodeRecord& e) {
  ordered_json j;
  j["schema_version"] = kLogSchemaVersion;
  j["episode_id"] = e.episode_id;
  j["env_name"] = e.env_name;
  j["algorithm_name"] = e.algorithm_name;
  j["seed"] = e.run_seed;
  j["policy_mode"] = std::string(policy_mode_name(e.policy_mode));
  j["actions"] = e.actions;
  if (!e.rewards.empty()) {
    j["rewards"] = e.rewards;
  } else {
    j["return"] = e.return_extrinsic;
  }
  j["global_step_at_end"] = e.global_step_at_end;
  j["truncated"] = e.truncated;
  return j.dump();
}

EpisodeRecord parse_log_line(std::string_view line, std::size_t line_number) {
  ordered_json j;
  try {
    j = ordered_json::parse(line);
  } catch (const nlohmann::json::parse_error& ex) {
    if (mentions_non_finite(line)) {
      throw SchemaError(line_number, "rewards", "non-finite number", ErrorCode::kNaNReward);
    }
    throw SchemaError(line_number, "json", ex.what());
  } catch (const nlohmann::json::out_of_range&) {
    throw SchemaError(line_number, "rewards", "number out of range", ErrorCode::kNaNReward);
  }
  if (!j.is_object()) throw SchemaError(line_number, "json", "expected an object");

  const ordered_json& version = require(j, "schema_version", line_number);
  if (!version.is_number_integer()) throw SchemaError(line_number, "schema_version", "expected an integer");
  if (version.get<std::int64_t>() != kLogSchemaVersion) {
    throw SchemaError(line_number, "schema_version",
                      "unsupported version " + std::to_string(version.get<std::int64_t>()),
                      ErrorCode::kVersionUnsupported);
  }

  EpisodeRecord e;
  e.episode_id = require_unsigned(j, "episode_id", line_number);
  e.env_name = require_string(j, "env_name", line_number);
  e.algorithm_name = require_string(j, "algorithm_name", line_number);
  e.run_seed = require_integer(j, "seed", line_number);
  const std::string mode = require_string(j, "policy_mode", line_number);
  if (mode != "stochastic" && mode != "greedy") {
    throw SchemaError(line_number, "policy_mode", "expected 'stochastic' or 'greedy'");
  }
  e.policy_mode = parse_policy_mode(mode);

  const ordered_json& actions = require(j, "actions", line_number);
  if (!actions.is_array() || actions.empty()) {
    throw SchemaError(line_number, "actions", "expected a non-empty integer array");
  }
  for (const auto& a : actions) {
    if (!a.is_number_integer()) throw SchemaError(line_number, "actions", "expected integers");
    const auto v = a.get<std::int64_t>();
    if (v < 0 || v > std::numeric_limits<ActionId>::max()) throw SchemaError(line_number, "actions", "action id out of range");
    e.actions.push_back(static_cast<ActionId>(v));
  }

  const auto rewards_it = j.find("rewards");
  const auto return_it = j.find("return");
  if (rewards_it == j.end() && return_it == j.end()) {
    throw SchemaError(line_number, "rewards", "either 'rewards' or 'return' is required");
  }
  if (rewards_it != j.end()) {
    if (!rewards_it->is_array()) throw SchemaError(line_number, "rewards", "expected a number array");
    for (const auto& r : *rewards_it) e.rewards.push_back(finite_number(r, "rewards", line_number));
    if (e.rewards.size() != e.actions.size()) {
      throw SchemaError(line_number, "rewards", "length " + std::to_string(e.rewards.size()) +
                                                    " differs from actions length " +
                                                    std::to_string(e.actions.size()));
    }
    e.return_extrinsic = sum_in_order(e.rewards);
    if (return_it != j.end()) {
      const double stated = finite_number(*return_it, "return", line_number);
      if (std::abs(stated - e.return_extrinsic) > 1e-9) {
        throw SchemaError(line_number, "return", "stated return does not match the sum of rewards");
      }
    }
  } else {
    e.return_extrinsic = finite_number(*return_it, "return", line_number);
  }
  e.return_total = e.return_extrinsic;
  e.length = static_cast<std::uint32_t>(e.actions.size());

  e.global_step_at_end = require_unsigned(j, "global_step_at_end", line_number);
  const ordered_json& truncated = require(j, "truncated", line_number);
  if (!truncated.is_boolean()) throw SchemaError(line_number, "truncated", "expected a boolean");
  e.truncated = truncated.get<bool>();
  e.env_seed = episode_env_seed(e.run_seed, e.episode_id);
  return e;
}

void write_log(std::span<const EpisodeRecord> episodes, std::ostream& out) {
  for (const EpisodeRecord& e : episodes) out << format_log_line(e) << '\n';
  if (!out) throw Error(ErrorCode::kIoFailure, "write failed");
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  if (ends_with_gz(path)) {
    gzFile gz = gzopen(tmp.c_str(), "wb");
    if (gz == nullptr) throw Error(ErrorCode::kIoFailure, "cannot open " + tmp.string());
    const int written = content.empty() ? 0 : gzwrite(gz, content.data(), static_cast<unsigned>(content.size()));
    const int closed = gzclose(gz);
    if (written != static_cast<int>(content.size()) || closed != Z_OK) {
      throw Error(ErrorCode::kIoFailure, "cannot write " + tmp.string());
    }
  } else {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIoFailure, "cannot open " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.close();
    if (!out) throw Error(ErrorCode::kIoFailure, "cannot write " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::kIoFailure, "cannot rename to " + path.string() + ": " + ec.message());
}

void write_log_file(std::span<const EpisodeRecord> episodes, const std::filesystem::path& path) {
  std::ostringstream out;
  write_log(episodes, out);
  write_file_atomic(path, out.str());
}

class LogReader::Source {
 public:
  virtual ~Source() = default;
  virtual bool getline(std::string& line) = 0;
};

namespace {

class StreamSource final : public LogReader::Source {
 public:
  explicit StreamSource(std::istream& in) : in_(in) {}
  bool getline(std::string& line) override { return static_cast<bool>(std::getline(in_, line)); }

 private:
  std::istream& in_;
};

class FileSource final : public LogReader::Source {
 public:
  explicit FileSource(const std::filesystem::path& path) : in_(path, std::ios::binary) {
    if (!in_) throw Error(ErrorCode::kIoFailure, "cannot open " + path.string());
  }
  bool getline(std::string& line) override { return static_cast<bool>(std::getline(in_, line)); }

 private:
  std::ifstream in_;
};

class GzipSource final : public LogReader::Source {
 public:
  explicit GzipSource(const std::filesystem::path& path) : gz_(gzopen(path.c_str(), "rb")) {
    if (gz_ == nullptr) throw Error(ErrorCode::kIoFailure, "cannot open " + path.string());
  }
  ~GzipSource() override { gzclose(gz_); }
  GzipSource(const GzipSource&) = delete;
  GzipSource& operator=(const GzipSource&) = delete;

  bool getline(std::string& line) override {
    line.clear();
    char buf[8192];
    while (gzgets(gz_, buf, sizeof(buf)) != nullptr) {
      line += buf;
      if (!line.empty() && line.back() == '\n') {
        line.pop_back();
        return true;
      }
    }
    int err = Z_OK;
    gzerror(gz_, &err);
    if (err != Z_OK && err != Z_STREAM_END) throw Error(ErrorCode::kIoFailure, "corrupt gzip stream");
    return !line.empty();
  }

 private:
  gzFile gz_;
};

}  // namespace

LogReader::LogReader(const std::filesystem::path& path) {
  if (ends_with_gz(path)) {
    source_ = std::make_unique<GzipSource>(path);
  } else {
    source_ = std::make_unique<FileSource>(path);
  }
}

LogReader::LogReader(std::istream& in) : source_(std::make_unique<StreamSource>(in)) {}

LogReader::~LogReader() = default;

std::optional<EpisodeRecord> LogReader::next() {
  std::string line;
  while (source_->getline(line)) {
    ++line_number_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    EpisodeRecord e = parse_log_line(line, line_number_);
    if (last_id_ && e.episode_id <= *last_id_) {
      throw SchemaError(line_number_, "episode_id",
                        "id " + std::to_string(e.episode_id) + " does not exceed previous id " +
                            std::to_string(*last_id_),
                        ErrorCode::kNonMonotoneIds);
    }
    last_id_ = e.episode_id;
    return e;
  }
  return std::nullopt;
}

std::vector<EpisodeRecord> read_log(std::istream& in) {
  LogReader reader(in);
  std::vector<EpisodeRecord> out;
  while (auto e = reader.next()) out.push_back(std::move(*e));
  return out;
}

std::vector<EpisodeRecord> read_log(const std::filesystem::path& path) {
  LogReader reader(path);
  std::vector<EpisodeRecord> out;
  while (auto e = reader.next()) out.push_back(std::move(*e));
  return out;
}

}  // namespace expgap
