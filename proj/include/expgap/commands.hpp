#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "expgap/aggregate.hpp"
#include "expgap/config.hpp"
#include "expgap/curves.hpp"
#include "expgap/estimators.hpp"
#include "expgap/svg_plot.hpp"

namespace expgap {

struct SeedOutputs {
  std::int64_t seed = 0;
  std::filesystem::path log_path;
  std::filesystem::path curve_path;
};

std::string run_file_stem(const RunConfig& config, std::int64_t seed);

// Runs every seed (up to `jobs` at a time) and writes, per seed,
// <stem>.jsonl and <stem>.csv into config.output_dir, plus the canonical
// config as run.cfg. Outputs are written atomically.
std::vector<SeedOutputs> cmd_run(const RunConfig& config, std::size_t jobs = 1);

// Recomputes the curve of each log from the log alone; rows are sorted by
// (seed, global_step).
std::vector<CurveRow> cmd_analyze(const std::vector<std::filesystem::path>& logs,
                                  const TrackerConfig& tracker, std::size_t eval_every);

struct TaskCurves {
  std::string task_name;
  std::vector<std::filesystem::path> curve_paths;
};

struct AggregateOutcome {
  AggregateReport report;
  std::vector<TaskResult> runs;  // final row of every seed, in input order
};

AggregateOutcome cmd_aggregate(const std::vector<TaskCurves>& tasks, GapVariant variant,
                               const BootstrapOptions& options, double epsilon = kDefaultGapEpsilon);

std::string format_breakdown_csv(const std::vector<TaskResult>& runs, double epsilon);
std::string format_report_csv(const std::string& label, const AggregateReport& report);
std::vector<LabeledReport> read_report_csv(std::istream& in);

// Entry point of the `expgap` executable. Returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace expgap
