#include "framepbo/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace framepbo {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                          "#9467bd", "#ff7f0e", "#8c564b"};
constexpr int kPaletteSize = 6;

std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

// Tick label: short, stable round-trip-free formatting.
std::string tick_label(double v) {
  if (v == 0.0) return "0";  // avoid "-0"
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (std::isfinite(v)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  void finish() {
    if (!(lo <= hi)) {
      lo = 0.0;
      hi = 1.0;
    }
    if (lo == hi) {
      lo -= 1.0;
      hi += 1.0;
    }
    double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
};

std::vector<double> nice_ticks(double lo, double hi, int target) {
  double span = hi - lo;
  double step0 = span / std::max(1, target);
  double mag = std::pow(10.0, std::floor(std::log10(step0)));
  double r = step0 / mag;
  double step = mag * (r < 1.5 ? 1.0 : r < 3.5 ? 2.0 : r < 7.5 ? 5.0 : 10.0);
  std::vector<double> ticks;
  double t = std::ceil(lo / step) * step;
  for (; t <= hi + 0.5 * step; t += step) {
    double v = (std::abs(t) < 1e-12 * step) ? 0.0 : t;
    ticks.push_back(v);
    if (ticks.size() > 40) break;
  }
  return ticks;
}

}  // namespace

std::string render_svg_plot(const PlotSpec& spec, int width, int height) {
  const double ml = 72.0, mr = 20.0, mt = 42.0, mb = 58.0;
  const double pw = width - ml - mr;
  const double ph = height - mt - mb;

  Range rx, ry;
  for (const PlotSeries& s : spec.series) {
    for (double v : s.x) rx.add(v);
    for (double v : s.y) ry.add(v);
  }
  for (const PlotMarker& m : spec.markers)
    (m.vertical ? rx : ry).add(m.value);
  rx.finish();
  ry.finish();

  auto X = [&](double v) { return ml + (v - rx.lo) / (rx.hi - rx.lo) * pw; };
  auto Y = [&](double v) {
    return mt + ph - (v - ry.lo) / (ry.hi - ry.lo) * ph;
  };

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
      << height << "\">\n"
      << "<rect width=\"" << width << "\" height=\"" << height
      << "\" fill=\"white\"/>\n"
      << "<text x=\"" << px(width / 2.0)
      << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\" "
         "text-anchor=\"middle\">"
      << xml_escape(spec.title) << "</text>\n";

  // Grid and ticks.
  for (double t : nice_ticks(rx.lo, rx.hi, 6)) {
    double x = X(t);
    out << "<line x1=\"" << px(x) << "\" y1=\"" << px(mt) << "\" x2=\""
        << px(x) << "\" y2=\"" << px(mt + ph)
        << "\" stroke=\"#e0e0e0\" stroke-width=\"1\"/>\n"
        << "<text x=\"" << px(x) << "\" y=\"" << px(mt + ph + 18)
        << "\" font-family=\"sans-serif\" font-size=\"11\" "
           "text-anchor=\"middle\">"
        << tick_label(t) << "</text>\n";
  }
  for (double t : nice_ticks(ry.lo, ry.hi, 6)) {
    double y = Y(t);
    out << "<line x1=\"" << px(ml) << "\" y1=\"" << px(y) << "\" x2=\""
        << px(ml + pw) << "\" y2=\"" << px(y)
        << "\" stroke=\"#e0e0e0\" stroke-width=\"1\"/>\n"
        << "<text x=\"" << px(ml - 6) << "\" y=\"" << px(y + 4)
        << "\" font-family=\"sans-serif\" font-size=\"11\" "
           "text-anchor=\"end\">"
        << tick_label(t) << "</text>\n";
  }

  // Axes.
  out << "<rect x=\"" << px(ml) << "\" y=\"" << px(mt) << "\" width=\""
      << px(pw) << "\" height=\"" << px(ph)
      << "\" fill=\"none\" stroke=\"#404040\" stroke-width=\"1\"/>\n"
      << "<text x=\"" << px(ml + pw / 2.0) << "\" y=\"" << px(mt + ph + 42)
      << "\" font-family=\"sans-serif\" font-size=\"12\" "
         "text-anchor=\"middle\">"
      << xml_escape(spec.x_label) << "</text>\n"
      << "<text x=\"18\" y=\"" << px(mt + ph / 2.0)
      << "\" font-family=\"sans-serif\" font-size=\"12\" "
         "text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << px(mt + ph / 2.0) << ")\">" << xml_escape(spec.y_label)
      << "</text>\n";

  // Markers.
  for (const PlotMarker& m : spec.markers) {
    if (m.vertical) {
      double x = X(m.value);
      out << "<line x1=\"" << px(x) << "\" y1=\"" << px(mt) << "\" x2=\""
          << px(x) << "\" y2=\"" << px(mt + ph)
          << "\" stroke=\"#808080\" stroke-width=\"1\" "
             "stroke-dasharray=\"5 4\"/>\n";
      if (!m.label.empty())
        out << "<text x=\"" << px(x + 4) << "\" y=\"" << px(mt + 14)
            << "\" font-family=\"sans-serif\" font-size=\"10\" "
               "fill=\"#606060\">"
            << xml_escape(m.label) << "</text>\n";
    } else {
      double y = Y(m.value);
      out << "<line x1=\"" << px(ml) << "\" y1=\"" << px(y) << "\" x2=\""
          << px(ml + pw) << "\" y2=\"" << px(y)
          << "\" stroke=\"#808080\" stroke-width=\"1\" "
             "stroke-dasharray=\"5 4\"/>\n";
      if (!m.label.empty())
        out << "<text x=\"" << px(ml + pw - 4) << "\" y=\"" << px(y - 5)
            << "\" font-family=\"sans-serif\" font-size=\"10\" "
               "fill=\"#606060\" text-anchor=\"end\">"
            << xml_escape(m.label) << "</text>\n";
    }
  }

  // Series.
  for (size_t si = 0; si < spec.series.size(); ++si) {
    const PlotSeries& s = spec.series[si];
    const char* color = kPalette[si % kPaletteSize];
    out << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.8\" points=\"";
    for (size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (i) out << " ";
      out << px(X(s.x[i])) << "," << px(Y(s.y[i]));
    }
    out << "\"/>\n";
  }

  // Legend (only when labels are present).
  double ly = mt + 12.0;
  for (size_t si = 0; si < spec.series.size(); ++si) {
    const PlotSeries& s = spec.series[si];
    if (s.label.empty()) continue;
    const char* color = kPalette[si % kPaletteSize];
    double lx = ml + pw - 150.0;
    out << "<line x1=\"" << px(lx) << "\" y1=\"" << px(ly - 4) << "\" x2=\""
        << px(lx + 22) << "\" y2=\"" << px(ly - 4) << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n"
        << "<text x=\"" << px(lx + 28) << "\" y=\"" << px(ly)
        << "\" font-family=\"sans-serif\" font-size=\"11\">"
        << xml_escape(s.label) << "</text>\n";
    ly += 16.0;
  }

  out << "</svg>\n";
  return out.str();
}

void write_svg_plot(const std::string& path, const PlotSpec& spec, int width,
                    int height) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << render_svg_plot(spec, width, height);
}

namespace {

std::vector<double> column_values(const CsvTable& t, const std::string& name) {
  int c = t.column(name);
  if (c < 0)
    throw std::runtime_error("csv column '" + name + "' is missing");
  std::vector<double> out;
  out.reserve(t.rows.size());
  for (const auto& row : t.rows)
    out.push_back(std::stod(row[static_cast<size_t>(c)]));
  return out;
}

}  // namespace

PlotSpec convergence_plot(const CsvTable& history, const std::string& title) {
  PlotSpec spec;
  spec.title = title;
  spec.x_label = "iteration";
  spec.y_label = "objective (kg)";
  std::vector<double> it = column_values(history, "iteration");
  spec.series.push_back({"best phi", it, column_values(history, "best_phi")});
  spec.series.push_back(
      {"best weight", it, column_values(history, "best_weight_kg")});
  return spec;
}

PlotSpec capacity_plot(const CsvTable& trace, const std::string& title,
                       const std::vector<PlotMarker>& markers) {
  PlotSpec spec;
  spec.title = title;
  spec.x_label = "roof displacement (m)";
  spec.y_label = "base shear (kN)";
  spec.series.push_back({"", column_values(trace, "roof_disp_m"),
                         column_values(trace, "base_shear_kN")});
  spec.markers = markers;
  return spec;
}

PlotSpec drift_plot(const CsvTable& profile, const std::string& title) {
  PlotSpec spec;
  spec.title = title;
  spec.x_label = "story drift ratio";
  spec.y_label = "story";
  std::vector<double> story = column_values(profile, "story");
  spec.series.push_back({"drift", column_values(profile, "drift"), story});
  std::vector<double> limit = column_values(profile, "limit");
  if (!limit.empty())
    spec.markers.push_back({limit.front(), "limit", true});
  return spec;
}

std::string format_penalty_text(const PenaltyReport& report) {
  std::ostringstream out;
  out << "weight_kg: " << format_double(report.F) << "\n"
      << "C: " << format_double(report.C) << "\n"
      << "phi: " << format_double(report.phi) << "\n"
      << "feasible: " << (report.C == 0.0 ? "yes" : "no") << "\n"
      << "constraints:\n";
  for (size_t i = 0; i < report.c.size(); ++i)
    out << "  c_" << (i + 1) << ": " << format_double(report.c[i]) << "\n";
  return out.str();
}

namespace {

std::string ids_line(const std::vector<int>& ids) {
  if (ids.empty()) return "-";
  std::string out;
  for (size_t i = 0; i < ids.size(); ++i) {
    if (i) out += " ";
    out += std::to_string(ids[i]);
  }
  return out;
}

}  // namespace

std::string format_case_report(const CaseArtifacts& a) {
  std::ostringstream out;
  out << "case: " << a.case_name << "\n"
      << "seed: " << a.seed << "\n"
      << "colony_size: " << a.colony_size << "\n"
      << "max_iterations: " << a.max_iterations << "\n"
      << "runs_per_level: " << a.runs << "\n";
  for (const LevelArtifacts& lv : a.levels) {
    out << "\n[" << level_name(lv.level) << "]\n"
        << "beams: " << ids_line(lv.best.beam_group_ids) << "\n"
        << "columns: " << ids_line(lv.best.column_group_ids) << "\n"
        << "walls: " << ids_line(lv.best.wall_group_ids) << "\n"
        << "weight_kg: " << format_double(lv.report.F) << "\n"
        << "C: " << format_double(lv.report.C) << "\n"
        << "phi: " << format_double(lv.report.phi) << "\n"
        << "feasible: " << (lv.report.C == 0.0 ? "yes" : "no") << "\n"
        << "run_seed: " << lv.seed << "\n"
        << "runs: " << lv.runs << "\n"
        << "mean_phi: " << format_double(lv.mean_phi) << "\n"
        << "stddev_phi: " << format_double(lv.stddev_phi) << "\n"
        << "evaluations: " << lv.evaluations << "\n"
        << "diverged: " << (lv.diverged ? "yes" : "no") << "\n"
        << "T_i_s: " << format_double(lv.T_i_s) << "\n"
        << "T_e_s: " << format_double(lv.T_e_s) << "\n"
        << "V_y_kn: " << format_double(lv.fit.V_y) << "\n"
        << "u_y_m: " << format_double(lv.fit.u_y) << "\n"
        << "delta_t_m: " << format_double(lv.delta_t_m) << "\n"
        << "target_reached: " << (lv.reached ? "yes" : "no") << "\n"
        << "drift_limit: " << format_double(lv.drift_limit) << "\n"
        << "drift_per_story:";
    for (double d : lv.drift) out << " " << format_double(d);
    out << "\n";
    out << "files:";
    for (const std::string& f : lv.files) out << " " << f;
    out << "\n";
  }
  return out.str();
}

}  // namespace framepbo
