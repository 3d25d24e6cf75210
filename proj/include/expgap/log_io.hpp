#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "expgap/trajectory.hpp"

namespace expgap {

inline constexpr int kLogSchemaVersion = 1;

// One JSON object per line with keys, in order: schema_version, episode_id,
// env_name, algorithm_name, seed, policy_mode, actions, rewards | return,
// global_step_at_end, truncated. Per-step rewards are written when the record
// has them, otherwise the return.
std::string format_log_line(const EpisodeRecord& episode);

// Validates one line (1-based line number for error reporting).
EpisodeRecord parse_log_line(std::string_view line, std::size_t line_number);

void write_log(std::span<const EpisodeRecord> episodes, std::ostream& out);

// Writes via a temporary file and rename; gzip-compressed when the path ends
// in ".gz". Throws IoFailure.
void write_log_file(std::span<const EpisodeRecord> episodes, const std::filesystem::path& path);

// Streaming reader; holds one line at a time. Rejects episode ids that do not
// strictly increase (NonMonotoneIds). Reads ".gz" files transparently.
class LogReader {
 public:
  explicit LogReader(const std::filesystem::path& path);
  explicit LogReader(std::istream& in);
  ~LogReader();
  LogReader(const LogReader&) = delete;
  LogReader& operator=(const LogReader&) = delete;

  std::optional<EpisodeRecord> next();
  std::size_t line_number() const { return line_number_; }

  class Source;

 private:
  std::unique_ptr<Source> source_;
  std::size_t line_number_ = 0;
  std::optional<EpisodeId> last_id_;
};

std::vector<EpisodeRecord> read_log(std::istream& in);
std::vector<EpisodeRecord> read_log(const std::filesystem::path& path);

// Writes `content` to `path` through a sibling temporary file and a rename.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace expgap
