#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "expgap/experience_tracker.hpp"
#include "expgap/trajectory.hpp"

namespace expgap {

struct CurveRow {
  std::uint64_t global_step = 0;
  std::int64_t seed = 0;
  double v_learned = 0.0;
  double v_learned_greedy = 0.0;  // NaN when no greedy evaluation ran yet
  double v_best_single = 0.0;
  double v_top5_ever = 0.0;
  double v_top5_recent = 0.0;
  double v_initial = 0.0;
  double gap_ever = 0.0;
  double gap_recent = 0.0;
};

inline constexpr std::array<std::string_view, 10> kCurveColumns = {
    "global_step", "seed",          "v_learned", "v_learned_greedy", "v_best_single",
    "v_top5_ever", "v_top5_recent", "v_initial", "gap_ever",         "gap_recent"};

// Turns an episode stream into curve rows. Snapshot rule: after every
// eval_every-th stochastic (training) episode a snapshot becomes pending; it is
// taken just before the next training episode is recorded, so the greedy
// evaluation episodes that follow a training block are included. finish()
// flushes the pending snapshot, or takes one if training episodes arrived
// since the last row. The runner and the log analyzer both go through this,
// so a log alone reproduces the runner's curve.
class CurveBuilder {
 public:
  CurveBuilder(TrackerConfig config, std::size_t eval_every, std::int64_t seed);

  void add(const EpisodeRecord& episode);
  void finish();

  const std::vector<CurveRow>& rows() const { return rows_; }
  const std::vector<MetricsPoint>& metrics() const { return metrics_; }
  const ExperienceTracker& tracker() const { return tracker_; }

 private:
  void emit(std::uint64_t global_step);

  ExperienceTracker tracker_;
  std::size_t eval_every_;
  std::int64_t seed_;
  std::size_t training_count_ = 0;
  std::size_t snapshotted_training_ = 0;
  std::optional<std::uint64_t> pending_step_;
  std::uint64_t last_training_step_ = 0;
  std::vector<CurveRow> rows_;
  std::vector<MetricsPoint> metrics_;
};

// CSV with a leading "# config_digest=<hex>" comment, then the exact column
// header, then one row per snapshot. Doubles use 17 significant digits.
void write_curve_csv(std::span<const CurveRow> rows, std::ostream& out,
                     std::string_view config_digest);
std::vector<CurveRow> read_curve_csv(std::istream& in);

std::string format_double(double value);

}  // namespace expgap
