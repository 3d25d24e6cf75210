#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <vector>

#include "expgap/aggregate.hpp"
#include "test_util.hpp"

namespace expgap {
namespace {

using testing::error_code_of;
using testing::same_bits;

TEST(NormalizedGap, Examples) {
  EXPECT_EQ(normalized_gap({"a", 10, 10, 0}), 0.0);
  EXPECT_EQ(normalized_gap({"a", 10, 0, 0}), 1.0);
  EXPECT_EQ(normalized_gap({"a", 10, 5, 0}), 0.5);
  EXPECT_EQ(normalized_gap({"b", 4, 3, 2}), 0.5);
  const std::vector<TaskResult> two{{"a", 10, 5, 0}, {"b", 4, 3, 2}};
  EXPECT_EQ(aggregate(two), 0.5);
}

TEST(NormalizedGap, DegenerateDenominator) {
  EXPECT_EQ(normalized_gap({"z", 0, 0, 0}), 0.0);
  EXPECT_FALSE(normalized_gap({"z", 1, 0.5, 1}).has_value());
  EXPECT_EQ(normalized_gap({"z", 1, 1 + 1e-12, 1}), 0.0);
}

TEST(NormalizedGap, NotClamped) {
  EXPECT_EQ(normalized_gap({"a", 10, -10, 0}), 2.0);
  EXPECT_EQ(normalized_gap({"a", 10, 15, 0}), -0.5);
}

TEST(Aggregate, OneTaskAndTwoTasks) {
  const std::vector<TaskResult> one{{"a", 8, 6, 0}};
  EXPECT_EQ(aggregate(one), 0.25);
  const std::vector<TaskResult> two{{"a", 1, 1, 0}, {"b", 1, 0, 0}};
  EXPECT_EQ(aggregate(two), 0.5);
}

TEST(Aggregate, InvalidTasksAreExcludedAndReported) {
  const std::vector<TaskResult> tasks{{"a", 10, 5, 0, 0}, {"flat", 3, 1, 3, 0}, {"flat", 3, 3, 3, 1}};
  EXPECT_EQ(aggregate(tasks), 0.25);  // mean over {a: 0.5, flat: 0 from the valid seed}
  EXPECT_EQ(invalid_tasks(tasks), std::vector<std::string>{"flat"});
  const std::vector<TaskResult> none{{"flat", 3, 1, 3}};
  EXPECT_EQ(error_code_of([&] { aggregate(none); }), ErrorCode::kAllTasksInvalid);
  EXPECT_EQ(error_code_of([&] { aggregate_report(none, GapVariant::kEver, {}); }), ErrorCode::kAllTasksInvalid);
}

std::vector<TaskResult> random_tasks(std::uint64_t seed, int n_tasks, int n_seeds) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<TaskResult> out;
  for (int t = 0; t < n_tasks; ++t) {
    for (int s = 0; s < n_seeds; ++s) {
      const double initial = u(gen) * 2 - 1;
      const double expert = initial + 0.1 + u(gen) * 5;
      const double learned = initial + (expert - initial) * (u(gen) * 1.2 - 0.1);
      out.push_back({"task" + std::to_string(t), expert, learned, initial, s});
    }
  }
  return out;
}

TEST(Aggregate, StraightLineOracle) {
  const auto tasks = random_tasks(3, 5, 1);
  double sum = 0.0;
  for (const auto& t : tasks) sum += (t.v_expert - t.v_learned) / (t.v_expert - t.v_initial);
  EXPECT_NEAR(aggregate(tasks), sum / 5.0, 1e-12);
}

TEST(Aggregate, PositiveScaleInvariance) {
  auto tasks = random_tasks(4, 6, 4);
  const double base = aggregate(tasks);
  for (auto& t : tasks) {
    t.v_expert *= 7.3;
    t.v_learned *= 7.3;
    t.v_initial *= 7.3;
  }
  EXPECT_LT(std::abs(aggregate(tasks) - base), 1e-9);
}

TEST(Aggregate, TaskOrderInvariance) {
  auto tasks = random_tasks(5, 6, 3);
  const double base = aggregate(tasks);
  const AggregateReport report = aggregate_report(tasks, GapVariant::kEver, {500, 0.95, 1});
  std::mt19937_64 gen(1);
  for (int i = 0; i < 20; ++i) {
    std::shuffle(tasks.begin(), tasks.end(), gen);
    EXPECT_TRUE(same_bits(aggregate(tasks), base));
    const AggregateReport again = aggregate_report(tasks, GapVariant::kEver, {500, 0.95, 1});
    EXPECT_TRUE(same_bits(again.ci_low, report.ci_low));
    EXPECT_TRUE(same_bits(again.ci_high, report.ci_high));
  }
}

TEST(Bootstrap, DegenerateScores) {
  const std::vector<TaskScores> scores{{"a", {0.4, 0.4, 0.4}}, {"b", {0.4}}};
  const AggregateReport r = bootstrap_ci(scores, {});
  EXPECT_EQ(r.point_estimate, 0.4);
  EXPECT_EQ(r.ci_low, 0.4);
  EXPECT_EQ(r.ci_high, 0.4);
  EXPECT_EQ(r.n_tasks, 2u);
  EXPECT_EQ(r.n_seeds, 3u);
}

TEST(Bootstrap, DeterministicGivenSeed) {
  const std::vector<TaskScores> scores{{"a", {0.1, 0.5, 0.9, 0.3}}, {"b", {1.0, 0.0}}};
  const AggregateReport a = bootstrap_ci(scores, {2000, 0.95, 42});
  const AggregateReport b = bootstrap_ci(scores, {2000, 0.95, 42});
  EXPECT_TRUE(same_bits(a.point_estimate, b.point_estimate));
  EXPECT_TRUE(same_bits(a.ci_low, b.ci_low));
  EXPECT_TRUE(same_bits(a.ci_high, b.ci_high));
  const AggregateReport c = bootstrap_ci(scores, {2000, 0.95, 43});
  EXPECT_FALSE(same_bits(a.ci_low, c.ci_low) && same_bits(a.ci_high, c.ci_high));
  EXPECT_LE(a.ci_low, a.point_estimate);
  EXPECT_LE(a.point_estimate, a.ci_high);
}

TEST(Bootstrap, Errors) {
  EXPECT_EQ(error_code_of([] { bootstrap_ci({}, {}); }), ErrorCode::kEmptyInput);
  const std::vector<TaskScores> empty_task{{"a", {}}};
  EXPECT_EQ(error_code_of([&] { bootstrap_ci(empty_task, {}); }), ErrorCode::kEmptyInput);
  const std::vector<TaskScores> ok{{"a", {1.0}}};
  EXPECT_EQ(error_code_of([&] { bootstrap_ci(ok, {0, 0.95, 0}); }), ErrorCode::kEmptyInput);
}

TEST(Bootstrap, CoverageOnNormalData) {
  std::mt19937_64 gen(2718);
  std::normal_distribution<double> normal(1.5, 2.0);
  int covered = 0;
  const int trials = 1000;
  for (int trial = 0; trial < trials; ++trial) {
    TaskScores task{"normal", std::vector<double>(50)};
    for (double& x : task.run_scores) x = normal(gen);
    const std::vector<TaskScores> one{task};
    const AggregateReport r = bootstrap_ci(one, {1000, 0.95, static_cast<std::uint64_t>(trial)});
    covered += (r.ci_low <= 1.5 && 1.5 <= r.ci_high) ? 1 : 0;
  }
  const double coverage = static_cast<double>(covered) / trials;
  EXPECT_GE(coverage, 0.92);
  EXPECT_LE(coverage, 0.98);
}

TEST(SortedQuantile, LinearInterpolation) {
  const std::vector<double> v{0.0, 1.0, 2.0, 3.0};
  EXPECT_EQ(sorted_quantile(v, 0.0), 0.0);
  EXPECT_EQ(sorted_quantile(v, 1.0), 3.0);
  EXPECT_EQ(sorted_quantile(v, 0.5), 1.5);
}

TEST(GapVariant, Names) {
  EXPECT_EQ(parse_gap_variant("recent"), GapVariant::kRecent);
  EXPECT_EQ(gap_variant_name(GapVariant::kEver), "ever");
  EXPECT_THROW(parse_gap_variant("all"), Error);
}

}  // namespace
}  // namespace expgap
