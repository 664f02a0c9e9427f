// SPDX-License-Identifier: Apache-2.0
#include "iscap/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <vector>

#include "iscap/errors.hpp"

namespace iscap {

const char* to_string(PlotKind kind) {
  switch (kind) {
    case PlotKind::objective_vs_axis: return "objective_vs_axis";
    case PlotKind::rate_and_crb_vs_axis: return "rate_and_crb_vs_axis";
    case PlotKind::time_vs_axis: return "time_vs_axis";
  }
  return "objective_vs_axis";
}

PlotKind parse_plot_kind(const std::string& name) {
  for (PlotKind k : {PlotKind::objective_vs_axis, PlotKind::rate_and_crb_vs_axis, PlotKind::time_vs_axis})
    if (name == to_string(k)) return k;
  throw ConfigError("unknown plot kind '" + name + "'");
}

namespace {

constexpr double kWidth = 760.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 90.0;
constexpr double kRight = 90.0;
constexpr double kTop = 50.0;
constexpr double kBottom = 70.0;

struct Point {
  double x, y, se;
};

struct Series {
  AccessMode mode;
  bool right_axis;
  std::vector<Point> points;
};

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void pad() {
    if (!(hi > lo)) {
      const double d = lo != 0.0 ? 0.1 * std::abs(lo) : 1.0;
      lo -= d;
      hi += d;
    } else {
      const double d = 0.05 * (hi - lo);
      lo -= d;
      hi += d;
    }
  }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

const char* colour(AccessMode m) { return m == AccessMode::rsma ? "#1f5fa8" : "#c8641e"; }

std::string axis_label(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::n_tx: return "Transmit antennas N_t";
    case SweepAxis::n_users: return "Information receivers K";
    case SweepAxis::snr_db: return "SNR (dB)";
    case SweepAxis::eh_threshold: return "EH threshold E_l (mW)";
  }
  return "";
}

double axis_scale(SweepAxis axis) { return axis == SweepAxis::eh_threshold ? 1e3 : 1.0; }

std::vector<AccessMode> modes_in(const SweepResult& r) {
  std::vector<AccessMode> modes;
  for (const AggregateRow& a : r.aggregates)
    if (std::find(modes.begin(), modes.end(), a.mode) == modes.end()) modes.push_back(a.mode);
  return modes;
}

template <class Pick>
Series make_series(const SweepResult& r, AccessMode m, bool right, Pick pick) {
  Series s{m, right, {}};
  for (const AggregateRow& a : r.aggregates) {
    if (a.mode != m) continue;
    const auto [y, se] = pick(a);
    s.points.push_back({a.value * axis_scale(r.axis), y, se});
  }
  return s;
}

}  // namespace

std::string render_plot(const SweepResult& result, PlotKind kind) {
  if (result.aggregates.empty()) throw ConfigError("cannot plot an empty sweep result");

  std::vector<Series> series;
  std::string left_label, right_label, title;
  for (AccessMode m : modes_in(result)) {
    switch (kind) {
      case PlotKind::objective_vs_axis:
        series.push_back(make_series(result, m, false, [](const AggregateRow& a) {
          return std::pair{a.objective.mean, a.objective.se};
        }));
        break;
      case PlotKind::rate_and_crb_vs_axis:
        series.push_back(make_series(result, m, false, [](const AggregateRow& a) {
          return std::pair{a.mmf_rate.mean, a.mmf_rate.se};
        }));
        series.push_back(make_series(result, m, true, [](const AggregateRow& a) {
          return std::pair{a.crb.mean, a.crb.se};
        }));
        break;
      case PlotKind::time_vs_axis:
        series.push_back(make_series(result, m, false, [](const AggregateRow& a) {
          return std::pair{a.time_per_inner.mean * 1e6, a.time_per_inner.se * 1e6};
        }));
        break;
    }
  }
  switch (kind) {
    case PlotKind::objective_vs_axis:
      title = "Objective";
      left_label = "Objective min rate - lambda CRB (nats/s/Hz)";
      break;
    case PlotKind::rate_and_crb_vs_axis:
      title = "MMF rate and CRB";
      left_label = "MMF rate (bit/s/Hz)";
      right_label = "CRB tr(F^-1)";
      break;
    case PlotKind::time_vs_axis:
      title = "Time per inner iteration";
      left_label = "Time per inner iteration (us)";
      break;
  }

  Range xr, yl, yr;
  for (const Series& s : series) {
    for (const Point& p : s.points) {
      xr.add(p.x);
      Range& y = s.right_axis ? yr : yl;
      y.add(p.y - p.se);
      y.add(p.y + p.se);
    }
  }
  xr.pad();
  yl.pad();
  const bool dual = kind == PlotKind::rate_and_crb_vs_axis;
  if (dual) yr.pad();

  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto sx = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
  auto sy = [&](double y, bool right) {
    const Range& r = right ? yr : yl;
    return kTop + (r.hi - y) / (r.hi - r.lo) * ph;
  };

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) +
         "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + num(kWidth / 2) + "\" y=\"28\" text-anchor=\"middle\" font-size=\"15\">" + title +
         "</text>\n";

  // Frame and ticks.
  svg += "<g class=\"axes\" stroke=\"black\" fill=\"none\">\n";
  svg += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" + num(pw) + "\" height=\"" + num(ph) +
         "\"/>\n";
  svg += "</g>\n<g class=\"ticks\">\n";
  constexpr int kTicks = 5;
  for (int i = 0; i <= kTicks; ++i) {
    const double f = static_cast<double>(i) / kTicks;
    const double xv = xr.lo + f * (xr.hi - xr.lo);
    const double px = sx(xv);
    svg += "<line x1=\"" + num(px) + "\" y1=\"" + num(kTop + ph) + "\" x2=\"" + num(px) + "\" y2=\"" +
           num(kTop + ph + 5) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + num(px) + "\" y=\"" + num(kTop + ph + 20) + "\" text-anchor=\"middle\">" +
           tick_label(xv) + "</text>\n";
    const double yv = yl.lo + f * (yl.hi - yl.lo);
    const double py = sy(yv, false);
    svg += "<line x1=\"" + num(kLeft - 5) + "\" y1=\"" + num(py) + "\" x2=\"" + num(kLeft) + "\" y2=\"" + num(py) +
           "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + num(kLeft - 8) + "\" y=\"" + num(py + 4) + "\" text-anchor=\"end\">" + tick_label(yv) +
           "</text>\n";
    if (dual) {
      const double rv = yr.lo + f * (yr.hi - yr.lo);
      const double qy = sy(rv, true);
      svg += "<line x1=\"" + num(kLeft + pw) + "\" y1=\"" + num(qy) + "\" x2=\"" + num(kLeft + pw + 5) +
             "\" y2=\"" + num(qy) + "\" stroke=\"black\"/>\n";
      svg += "<text x=\"" + num(kLeft + pw + 8) + "\" y=\"" + num(qy + 4) + "\" text-anchor=\"start\">" +
             tick_label(rv) + "</text>\n";
    }
  }
  svg += "</g>\n";
  svg += "<text class=\"xlabel\" x=\"" + num(kLeft + pw / 2) + "\" y=\"" + num(kHeight - 20) +
         "\" text-anchor=\"middle\">" + axis_label(result.axis) + "</text>\n";
  svg += "<text class=\"ylabel\" transform=\"translate(22," + num(kTop + ph / 2) +
         ") rotate(-90)\" text-anchor=\"middle\">" + left_label + "</text>\n";
  if (dual)
    svg += "<text class=\"ylabel-right\" transform=\"translate(" + num(kWidth - 14) + "," + num(kTop + ph / 2) +
           ") rotate(90)\" text-anchor=\"middle\">" + right_label + "</text>\n";

  // Data: solid lines and circles on the left axis, dashed lines and squares
  // on the right axis.
  int legend_row = 0;
  for (const Series& s : series) {
    const char* c = colour(s.mode);
    svg += std::string("<g class=\"series\" data-mode=\"") + to_string(s.mode) + "\" data-axis=\"" +
           (s.right_axis ? "right" : "left") + "\" stroke=\"" + c + "\" fill=\"" + c + "\">\n";
    if (s.points.size() > 1) {
      svg += "<polyline fill=\"none\" stroke-width=\"1.5\"";
      if (s.right_axis) svg += " stroke-dasharray=\"6 4\"";
      svg += " points=\"";
      for (const Point& p : s.points) svg += num(sx(p.x)) + "," + num(sy(p.y, s.right_axis)) + " ";
      svg += "\"/>\n";
    }
    for (const Point& p : s.points) {
      const double px = sx(p.x);
      const double py = sy(p.y, s.right_axis);
      if (p.se > 0.0) {
        const double lo = sy(p.y - p.se, s.right_axis);
        const double hi = sy(p.y + p.se, s.right_axis);
        svg += "<line class=\"errorbar\" x1=\"" + num(px) + "\" y1=\"" + num(lo) + "\" x2=\"" + num(px) +
               "\" y2=\"" + num(hi) + "\"/>\n";
        for (double yy : {lo, hi})
          svg += "<line x1=\"" + num(px - 4) + "\" y1=\"" + num(yy) + "\" x2=\"" + num(px + 4) + "\" y2=\"" +
                 num(yy) + "\"/>\n";
      }
      if (s.right_axis)
        svg += "<rect class=\"marker\" x=\"" + num(px - 3.5) + "\" y=\"" + num(py - 3.5) +
               "\" width=\"7\" height=\"7\"/>\n";
      else
        svg += "<circle class=\"marker\" cx=\"" + num(px) + "\" cy=\"" + num(py) + "\" r=\"3.5\"/>\n";
    }
    svg += "</g>\n";

    const double ly = kTop + 14 + 16 * legend_row++;
    const double lx = kLeft + 12;
    std::string name = s.mode == AccessMode::rsma ? "RSMA" : "SDMA";
    if (dual) name += s.right_axis ? " CRB" : " MMF rate";
    svg += std::string("<g class=\"legend\" stroke=\"") + c + "\">\n";
    svg += "<line x1=\"" + num(lx) + "\" y1=\"" + num(ly) + "\" x2=\"" + num(lx + 24) + "\" y2=\"" + num(ly) + "\"";
    if (s.right_axis) svg += " stroke-dasharray=\"6 4\"";
    svg += "/>\n<text x=\"" + num(lx + 30) + "\" y=\"" + num(ly + 4) + "\" stroke=\"none\" fill=\"black\">" + name +
           "</text>\n</g>\n";
  }
  svg += "</svg>\n";
  return svg;
}

void emit_plot(const SweepResult& result, PlotKind kind, const std::string& path) {
  const std::string svg = render_plot(result, kind);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << svg;
  if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace iscap
