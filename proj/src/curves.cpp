#include "expgap/curves.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>

#include "expgap/error.hpp"

namespace expgap {

CurveBuilder::CurveBuilder(TrackerConfig config, std::size_t eval_every, std::int64_t seed)
    : tracker_(config), eval_every_(eval_every), seed_(seed) {
  if (eval_every_ == 0) throw Error(ErrorCode::kInvalidSpec, "eval_every must be positive");
}

void CurveBuilder::add(const EpisodeRecord& episode) {
  if (episode.policy_mode == PolicyMode::kStochastic) {
    if (pending_step_) {
      emit(*pending_step_);
      pending_step_.reset();
    }
    tracker_.record_episode(episode);
    ++training_count_;
    last_training_step_ = episode.global_step_at_end;
    if (training_count_ % eval_every_ == 0) pending_step_ = last_training_step_;
    return;
  }
  tracker_.record_episode(episode);
}

void CurveBuilder::finish() {
  if (pending_step_) {
    emit(*pending_step_);
    pending_step_.reset();
  } else if (training_count_ > snapshotted_training_ && tracker_.episode_count() > 0) {
    emit(last_training_step_);
  }
}

void CurveBuilder::emit(std::uint64_t global_step) {
  const MetricsPoint p = tracker_.snapshot(global_step, PolicyMode::kStochastic);
  CurveRow row;
  row.global_step = global_step;
  row.seed = seed_;
  row.v_learned = p.v_learned;
  row.v_learned_greedy = tracker_.learned_value(PolicyMode::kGreedy).value_or(NAN);
  row.v_best_single = p.v_best_single;
  row.v_top5_ever = p.v_top5_ever;
  row.v_top5_recent = p.v_top5_recent;
  row.v_initial = p.v_initial;
  row.gap_ever = p.gap_ever;
  row.gap_recent = p.gap_recent;
  rows_.push_back(row);
  metrics_.push_back(p);
  snapshotted_training_ = training_count_;
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

void write_curve_csv(std::span<const CurveRow> rows, std::ostream& out, std::string_view config_digest) {
  out << "# config_digest=" << (config_digest.empty() ? "none" : config_digest) << '\n';
  for (std::size_t i = 0; i < kCurveColumns.size(); ++i) out << (i ? "," : "") << kCurveColumns[i];
  out << '\n';
  for (const CurveRow& r : rows) {
    out << r.global_step << ',' << r.seed << ',' << format_double(r.v_learned) << ','
        << format_double(r.v_learned_greedy) << ',' << format_double(r.v_best_single) << ','
        << format_double(r.v_top5_ever) << ',' << format_double(r.v_top5_recent) << ','
        << format_double(r.v_initial) << ',' << format_double(r.gap_ever) << ','
        << format_double(r.gap_recent) << '\n';
  }
}

namespace {

double parse_field(const std::string& text, std::size_t line, std::string_view column) {
  const char* begin = text.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (text.empty() || end != begin + text.size()) {
    throw SchemaError(line, std::string(column), "not a number: '" + text + "'");
  }
  return v;
}

}  // namespace

std::vector<CurveRow> read_curve_csv(std::istream& in) {
  std::vector<CurveRow> rows;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!header_seen) {
      if (cells.size() != kCurveColumns.size()) throw SchemaError(line_no, "header", "unexpected column count");
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (cells[i] != kCurveColumns[i]) throw SchemaError(line_no, "header", "unexpected column '" + cells[i] + "'");
      }
      header_seen = true;
      continue;
    }
    if (cells.size() != kCurveColumns.size()) throw SchemaError(line_no, "row", "expected 10 cells");
    CurveRow r;
    r.global_step = static_cast<std::uint64_t>(parse_field(cells[0], line_no, kCurveColumns[0]));
    r.seed = static_cast<std::int64_t>(parse_field(cells[1], line_no, kCurveColumns[1]));
    double* fields[] = {&r.v_learned,    &r.v_learned_greedy, &r.v_best_single, &r.v_top5_ever,
                        &r.v_top5_recent, &r.v_initial,       &r.gap_ever,      &r.gap_recent};
    for (std::size_t i = 0; i < 8; ++i) *fields[i] = parse_field(cells[i + 2], line_no, kCurveColumns[i + 2]);
    rows.push_back(r);
  }
  if (!header_seen) throw Error(ErrorCode::kEmptyInput, "curve table has no header row");
  return rows;
}

}  // namespace expgap
