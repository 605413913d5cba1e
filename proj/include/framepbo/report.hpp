#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "framepbo/analysis.hpp"
#include "framepbo/csvio.hpp"
#include "framepbo/evaluator.hpp"
#include "framepbo/frame.hpp"
#include "framepbo/perf_constraints.hpp"

namespace framepbo {

// ---------------------------------------------------------------------------
// Self-contained SVG line plots. Rendering is fully determined by the PlotSpec;
// repeated calls produce identical bytes.

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotMarker {
  double value = 0.0;
  std::string label;
  bool vertical = true;  // vertical: fixed x; horizontal: fixed y
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<PlotSeries> series;
  std::vector<PlotMarker> markers;
};

std::string render_svg_plot(const PlotSpec& spec, int width = 720,
                            int height = 480);
void write_svg_plot(const std::string& path, const PlotSpec& spec,
                    int width = 720, int height = 480);

// ---------------------------------------------------------------------------
// Plot builders for the emitted CSV artifacts, so plots can be re-rendered
// from the files alone.

// From a convergence history CSV (iteration, best_phi, best_weight_kg, ...).
PlotSpec convergence_plot(const CsvTable& history, const std::string& title);

// From a pushover trace CSV (step, load_factor, base_shear_kN, roof_disp_m,
// drift_1..). Optional vertical markers at per-level target displacements.
PlotSpec capacity_plot(const CsvTable& trace, const std::string& title,
                       const std::vector<PlotMarker>& markers = {});

// From a drift profile CSV (story, drift, limit).
PlotSpec drift_plot(const CsvTable& profile, const std::string& title);

// ---------------------------------------------------------------------------
// Structured text artifacts.

// Penalty report as key: value text, all constraint slots listed.
std::string format_penalty_text(const PenaltyReport& report);

// Everything the case report prints for one optimized level.
struct LevelArtifacts {
  PerformanceLevel level = PerformanceLevel::IO;
  DesignVector best;
  PenaltyReport report;       // report.F is the structure weight in kg
  double delta_t_m = 0.0;
  bool reached = false;
  std::vector<double> drift;  // story drifts at the target displacement
  double drift_limit = 0.0;
  double T_i_s = 0.0;
  double T_e_s = 0.0;
  BilinearFit fit;
  std::uint64_t seed = 0;
  int runs = 1;
  double mean_phi = 0.0;
  double stddev_phi = 0.0;
  long long evaluations = 0;
  bool diverged = false;
  std::vector<std::string> files;  // artifact paths relative to the out dir
};

struct CaseArtifacts {
  std::string case_name;
  std::uint64_t seed = 0;
  int colony_size = 0;
  int max_iterations = 0;
  int runs = 1;
  std::vector<LevelArtifacts> levels;
};

std::string format_case_report(const CaseArtifacts& artifacts);

}  // namespace framepbo
