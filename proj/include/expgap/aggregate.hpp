#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace expgap {

// Which experience-optimal estimate plays the role of the expert value.
enum class GapVariant { kEver, kRecent };

std::string_view gap_variant_name(GapVariant variant);
GapVariant parse_gap_variant(std::string_view text);

struct TaskResult {
  std::string task_name;
  double v_expert = 0.0;
  double v_learned = 0.0;
  double v_initial = 0.0;
  std::int64_t seed = 0;
};

inline constexpr double kDefaultGapEpsilon = 1e-9;

// (expert - learned) / (expert - initial). When the denominator is below
// epsilon in magnitude the result is 0 if the numerator is too, and nullopt
// (invalid, to be excluded and reported) otherwise. Never clamped.
std::optional<double> normalized_gap(const TaskResult& t, double epsilon = kDefaultGapEpsilon);

// Mean over tasks of the per-task mean normalized gap. Runs are grouped by
// task_name; invalid runs are dropped. Throws AllTasksInvalid when nothing is
// left. The result does not depend on the order of `tasks`.
double aggregate(std::span<const TaskResult> tasks, double epsilon = kDefaultGapEpsilon);

// Names of tasks with at least one invalid run, sorted and deduplicated.
std::vector<std::string> invalid_tasks(std::span<const TaskResult> tasks,
                                       double epsilon = kDefaultGapEpsilon);

struct TaskScores {
  std::string task_name;
  std::vector<double> run_scores;
};

struct BootstrapOptions {
  std::size_t n_resamples = 2000;
  double confidence = 0.95;
  std::uint64_t rng_seed = 0;
};

struct AggregateReport {
  double point_estimate = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t n_tasks = 0;
  std::size_t n_seeds = 0;
  GapVariant variant = GapVariant::kEver;
  std::vector<std::string> invalid_tasks;
};

// Stratified percentile bootstrap of the mean-over-tasks of mean run scores:
// each resample redraws every task's runs with replacement. Resample b draws
// from its own stream seeded by (rng_seed, b), so the report depends only on
// the inputs and rng_seed. The interval is widened, if needed, to contain the
// point estimate. Throws EmptyInput.
AggregateReport bootstrap_ci(std::span<const TaskScores> per_task, const BootstrapOptions& options,
                             GapVariant variant = GapVariant::kEver);

// Normalized gaps per run grouped into TaskScores, then bootstrap_ci; invalid
// runs are excluded and their tasks reported. Throws AllTasksInvalid.
AggregateReport aggregate_report(std::span<const TaskResult> tasks, GapVariant variant,
                                 const BootstrapOptions& options,
                                 double epsilon = kDefaultGapEpsilon);

// Percentile with linear interpolation between order statistics of an
// ascending-sorted sample.
double sorted_quantile(std::span<const double> sorted, double q);

}  // namespace expgap
