#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "expgap/aggregate.hpp"
#include "expgap/curves.hpp"

namespace expgap {

inline constexpr std::array<std::string_view, 6> kCurveLegend = {
    "learned", "learned-greedy", "best-single", "top5-ever", "top5-recent", "initial"};

// Line chart of the six estimators against global_step. Rows are grouped by
// seed and aligned by snapshot ordinal (seeds may reach different step counts);
// each series is the mean across seeds with a min-max band. NaN cells are
// skipped. Output bytes depend only on the rows and title. Throws EmptyInput.
std::string render_curve_svg(std::span<const CurveRow> rows, std::string_view title);

struct LabeledReport {
  std::string label;
  AggregateReport report;
};

// Bar chart of aggregate point estimates with confidence-interval whiskers.
std::string render_aggregate_svg(std::span<const LabeledReport> reports, std::string_view title);

}  // namespace expgap
