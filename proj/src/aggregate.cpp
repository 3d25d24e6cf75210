#include "expgap/aggregate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "expgap/error.hpp"
#include "expgap/estimators.hpp"
#include "expgap/rng.hpp"

namespace expgap {

std::string_view gap_variant_name(GapVariant variant) {
  return variant == GapVariant::kRecent ? "recent" : "ever";
}

GapVariant parse_gap_variant(std::string_view text) {
  if (text == "ever") return GapVariant::kEver;
  if (text == "recent") return GapVariant::kRecent;
  throw Error(ErrorCode::kConfigError, "unknown gap variant '" + std::string(text) + "'");
}

std::optional<double> normalized_gap(const TaskResult& t, double epsilon) {
  const double numerator = t.v_expert - t.v_learned;
  const double denominator = t.v_expert - t.v_initial;
  if (std::abs(denominator) < epsilon) {
    if (std::abs(numerator) < epsilon) return 0.0;
    return std::nullopt;
  }
  return numerator / denominator;
}

namespace {

struct RunGap {
  std::int64_t seed;
  double gap;
  bool operator<(const RunGap& o) const { return seed != o.seed ? seed < o.seed : gap < o.gap; }
};

std::map<std::string, std::vector<RunGap>> valid_gaps_by_task(std::span<const TaskResult> tasks,
                                                               double epsilon) {
  std::map<std::string, std::vector<RunGap>> grouped;
  for (const TaskResult& t : tasks) {
    if (auto g = normalized_gap(t, epsilon)) grouped[t.task_name].push_back({t.seed, *g});
  }
  for (auto& [name, runs] : grouped) std::sort(runs.begin(), runs.end());
  return grouped;
}

}  // namespace

double aggregate(std::span<const TaskResult> tasks, double epsilon) {
  const auto grouped = valid_gaps_by_task(tasks, epsilon);
  if (grouped.empty()) throw Error(ErrorCode::kAllTasksInvalid, "no task has a valid normalized gap");
  std::vector<double> task_means;
  task_means.reserve(grouped.size());
  for (const auto& [name, runs] : grouped) {
    std::vector<double> gaps;
    for (const RunGap& r : runs) gaps.push_back(r.gap);
    task_means.push_back(mean_of(gaps));
  }
  return mean_of(task_means);
}

std::vector<std::string> invalid_tasks(std::span<const TaskResult> tasks, double epsilon) {
  std::set<std::string> names;
  for (const TaskResult& t : tasks) {
    if (!normalized_gap(t, epsilon)) names.insert(t.task_name);
  }
  return {names.begin(), names.end()};
}

double sorted_quantile(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw Error(ErrorCode::kEmptyInput, "quantile of an empty sample");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + (sorted[hi] - sorted[lo]) * frac;
}

AggregateReport bootstrap_ci(std::span<const TaskScores> per_task, const BootstrapOptions& options,
                             GapVariant variant) {
  if (per_task.empty()) throw Error(ErrorCode::kEmptyInput, "bootstrap over no tasks");
  if (options.n_resamples == 0) throw Error(ErrorCode::kEmptyInput, "n_resamples must be positive");
  if (!(options.confidence > 0.0 && options.confidence < 1.0)) {
    throw Error(ErrorCode::kEmptyInput, "confidence must lie in (0, 1)");
  }
  std::size_t max_runs = 0;
  std::vector<double> task_means;
  for (const TaskScores& t : per_task) {
    if (t.run_scores.empty()) throw Error(ErrorCode::kEmptyInput, "task '" + t.task_name + "' has no runs");
    max_runs = std::max(max_runs, t.run_scores.size());
    task_means.push_back(mean_of(t.run_scores));
  }

  AggregateReport report;
  report.point_estimate = mean_of(task_means);
  report.n_tasks = per_task.size();
  report.n_seeds = max_runs;
  report.variant = variant;

  std::vector<double> stats(options.n_resamples);
  std::vector<double> resampled_task_means(per_task.size());
  std::vector<double> draw;
  for (std::size_t b = 0; b < options.n_resamples; ++b) {
    SplitMix64 stream(derive_seed(options.rng_seed, b));
    for (std::size_t t = 0; t < per_task.size(); ++t) {
      const auto& runs = per_task[t].run_scores;
      draw.resize(runs.size());
      for (double& d : draw) d = runs[stream.below(runs.size())];
      resampled_task_means[t] = mean_of(draw);
    }
    stats[b] = mean_of(resampled_task_means);
  }
  std::sort(stats.begin(), stats.end());
  const double alpha = 1.0 - options.confidence;
  report.ci_low = std::min(sorted_quantile(stats, alpha / 2.0), report.point_estimate);
  report.ci_high = std::max(sorted_quantile(stats, 1.0 - alpha / 2.0), report.point_estimate);
  return report;
}

AggregateReport aggregate_report(std::span<const TaskResult> tasks, GapVariant variant,
                                 const BootstrapOptions& options, double epsilon) {
  const auto grouped = valid_gaps_by_task(tasks, epsilon);
  if (grouped.empty()) throw Error(ErrorCode::kAllTasksInvalid, "no task has a valid normalized gap");
  std::vector<TaskScores> per_task;
  for (const auto& [name, runs] : grouped) {
    TaskScores scores{name, {}};
    for (const RunGap& r : runs) scores.run_scores.push_back(r.gap);
    per_task.push_back(std::move(scores));
  }
  AggregateReport report = bootstrap_ci(per_task, options, variant);
  report.invalid_tasks = invalid_tasks(tasks, epsilon);
  return report;
}

}  // namespace expgap
