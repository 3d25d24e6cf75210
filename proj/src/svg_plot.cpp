#include "expgap/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "expgap/error.hpp"

namespace expgap {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 170.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;

constexpr std::array<std::string_view, 6> kPalette = {"#1f77b4", "#ff7f0e", "#2ca02c",
                                                      "#d62728", "#9467bd", "#7f7f7f"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

std::string escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = INFINITY;
  double hi = -INFINITY;
  void include(double v) {
    if (std::isfinite(v)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  void pad() {
    if (!std::isfinite(lo)) {
      lo = 0.0;
      hi = 1.0;
    } else if (lo == hi) {
      const double d = lo == 0.0 ? 1.0 : std::abs(lo) * 0.5;
      lo -= d;
      hi += d;
    }
  }
};

struct Frame {
  Range x;
  Range y;
  double px(double v) const { return kLeft + (v - x.lo) / (x.hi - x.lo) * (kWidth - kLeft - kRight); }
  double py(double v) const { return kHeight - kBottom - (v - y.lo) / (y.hi - y.lo) * (kHeight - kTop - kBottom); }
};

void open_svg(std::ostringstream& out, std::string_view title) {
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n"
      << "<text x=\"" << num(kWidth / 2) << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"16\">" << escape(title) << "</text>\n";
}

void draw_axes(std::ostringstream& out, const Frame& f, std::string_view x_title, std::string_view y_title,
               bool x_ticks) {
  const double x0 = kLeft;
  const double x1 = kWidth - kRight;
  const double y0 = kHeight - kBottom;
  const double y1 = kTop;
  out << "<g stroke=\"black\" stroke-width=\"1\">\n"
      << "<line x1=\"" << num(x0) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(x1) << "\" y2=\"" << num(y0) << "\"/>\n"
      << "<line x1=\"" << num(x0) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(x0) << "\" y2=\"" << num(y1) << "\"/>\n"
      << "</g>\n<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int i = 0; i <= 4; ++i) {
    const double yv = f.y.lo + (f.y.hi - f.y.lo) * i / 4.0;
    const double py = f.py(yv);
    out << "<line x1=\"" << num(x0 - 4) << "\" y1=\"" << num(py) << "\" x2=\"" << num(x0) << "\" y2=\"" << num(py)
        << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << num(x0 - 6) << "\" y=\"" << num(py + 4) << "\" text-anchor=\"end\">" << label(yv) << "</text>\n";
    if (x_ticks) {
      const double xv = f.x.lo + (f.x.hi - f.x.lo) * i / 4.0;
      const double px = f.px(xv);
      out << "<line x1=\"" << num(px) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(px) << "\" y2=\"" << num(y0 + 4)
          << "\" stroke=\"black\"/>\n"
          << "<text x=\"" << num(px) << "\" y=\"" << num(y0 + 16) << "\" text-anchor=\"middle\">" << label(xv) << "</text>\n";
    }
  }
  out << "<text x=\"" << num((x0 + x1) / 2) << "\" y=\"" << num(kHeight - 10) << "\" text-anchor=\"middle\">"
      << escape(x_title) << "</text>\n"
      << "<text x=\"16\" y=\"" << num((y0 + y1) / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << num((y0 + y1) / 2) << ")\">" << escape(y_title) << "</text>\n</g>\n";
}

struct SeriesPoint {
  double x;
  double mean;
  double lo;
  double hi;
};

}  // namespace

std::string render_curve_svg(std::span<const CurveRow> rows, std::string_view title) {
  if (rows.empty()) throw Error(ErrorCode::kEmptyInput, "no curve rows to plot");
  std::map<std::int64_t, std::vector<CurveRow>> by_seed;
  for (const CurveRow& r : rows) by_seed[r.seed].push_back(r);
  std::size_t n = SIZE_MAX;
  for (const auto& [seed, seed_rows] : by_seed) n = std::min(n, seed_rows.size());

  const auto value = [](const CurveRow& r, std::size_t s) {
    switch (s) {
      case 0: return r.v_learned;
      case 1: return r.v_learned_greedy;
      case 2: return r.v_best_single;
      case 3: return r.v_top5_ever;
      case 4: return r.v_top5_recent;
      default: return r.v_initial;
    }
  };

  std::array<std::vector<SeriesPoint>, 6> series;
  Frame frame;
  for (std::size_t i = 0; i < n; ++i) {
    double x_sum = 0.0;
    for (const auto& [seed, seed_rows] : by_seed) x_sum += static_cast<double>(seed_rows[i].global_step);
    const double x = x_sum / static_cast<double>(by_seed.size());
    frame.x.include(x);
    for (std::size_t s = 0; s < series.size(); ++s) {
      double sum = 0.0;
      double lo = INFINITY;
      double hi = -INFINITY;
      std::size_t count = 0;
      for (const auto& [seed, seed_rows] : by_seed) {
        const double v = value(seed_rows[i], s);
        if (!std::isfinite(v)) continue;
        sum += v;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        ++count;
      }
      if (count == 0) continue;
      series[s].push_back({x, sum / static_cast<double>(count), lo, hi});
      frame.y.include(lo);
      frame.y.include(hi);
    }
  }
  frame.x.pad();
  frame.y.pad();

  std::ostringstream out;
  open_svg(out, title);
  draw_axes(out, frame, "global step", "return", true);
  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto& pts = series[s];
    const std::string_view color = kPalette[s];
    out << "<g id=\"series-" << kCurveLegend[s] << "\">\n";
    if (pts.size() > 1) {
      out << "<polygon fill=\"" << color << "\" fill-opacity=\"0.15\" stroke=\"none\" points=\"";
      for (const auto& p : pts) out << num(frame.px(p.x)) << ',' << num(frame.py(p.hi)) << ' ';
      for (auto it = pts.rbegin(); it != pts.rend(); ++it) {
        out << num(frame.px(it->x)) << ',' << num(frame.py(it->lo)) << (std::next(it) == pts.rend() ? "" : " ");
      }
      out << "\"/>\n<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
      for (std::size_t i = 0; i < pts.size(); ++i) {
        out << (i ? " " : "") << num(frame.px(pts[i].x)) << ',' << num(frame.py(pts[i].mean));
      }
      out << "\"/>\n";
    } else {
      for (const auto& p : pts) {
        out << "<circle cx=\"" << num(frame.px(p.x)) << "\" cy=\"" << num(frame.py(p.mean)) << "\" r=\"3\" fill=\""
            << color << "\"/>\n";
      }
    }
    out << "</g>\n";
  }

  const double lx = kWidth - kRight + 15;
  out << "<g font-family=\"sans-serif\" font-size=\"12\">\n";
  for (std::size_t s = 0; s < kCurveLegend.size(); ++s) {
    const double ly = kTop + 10 + 20.0 * static_cast<double>(s);
    out << "<line x1=\"" << num(lx) << "\" y1=\"" << num(ly) << "\" x2=\"" << num(lx + 20) << "\" y2=\"" << num(ly)
        << "\" stroke=\"" << kPalette[s] << "\" stroke-width=\"2\"/>\n"
        << "<text x=\"" << num(lx + 26) << "\" y=\"" << num(ly + 4) << "\">" << kCurveLegend[s] << "</text>\n";
  }
  out << "</g>\n</svg>\n";
  return out.str();
}

std::string render_aggregate_svg(std::span<const LabeledReport> reports, std::string_view title) {
  if (reports.empty()) throw Error(ErrorCode::kEmptyInput, "no aggregate reports to plot");
  Frame frame;
  frame.x.lo = 0.0;
  frame.x.hi = static_cast<double>(reports.size());
  frame.y.include(0.0);
  for (const auto& r : reports) {
    frame.y.include(r.report.ci_low);
    frame.y.include(r.report.ci_high);
    frame.y.include(r.report.point_estimate);
  }
  frame.y.pad();

  std::ostringstream out;
  open_svg(out, title);
  draw_axes(out, frame, "", "normalized practical sub-optimality", false);
  out << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& rep = reports[i].report;
    const double left = frame.px(static_cast<double>(i) + 0.2);
    const double right = frame.px(static_cast<double>(i) + 0.8);
    const double mid = (left + right) / 2;
    const double base = frame.py(0.0);
    const double top = frame.py(rep.point_estimate);
    out << "<rect class=\"bar\" x=\"" << num(left) << "\" y=\"" << num(std::min(base, top)) << "\" width=\""
        << num(right - left) << "\" height=\"" << num(std::abs(base - top)) << "\" fill=\""
        << kPalette[i % kPalette.size()] << "\" fill-opacity=\"0.7\"/>\n"
        << "<g class=\"whisker\" stroke=\"black\" stroke-width=\"1.5\">\n"
        << "<line x1=\"" << num(mid) << "\" y1=\"" << num(frame.py(rep.ci_low)) << "\" x2=\"" << num(mid)
        << "\" y2=\"" << num(frame.py(rep.ci_high)) << "\"/>\n"
        << "<line x1=\"" << num(mid - 8) << "\" y1=\"" << num(frame.py(rep.ci_low)) << "\" x2=\"" << num(mid + 8)
        << "\" y2=\"" << num(frame.py(rep.ci_low)) << "\"/>\n"
        << "<line x1=\"" << num(mid - 8) << "\" y1=\"" << num(frame.py(rep.ci_high)) << "\" x2=\"" << num(mid + 8)
        << "\" y2=\"" << num(frame.py(rep.ci_high)) << "\"/>\n</g>\n"
        << "<text x=\"" << num(mid) << "\" y=\"" << num(kHeight - kBottom + 16) << "\" text-anchor=\"middle\">"
        << escape(reports[i].label) << " (" << gap_variant_name(rep.variant) << ")</text>\n";
  }
  out << "</g>\n</svg>\n";
  return out.str();
}

}  // namespace expgap
