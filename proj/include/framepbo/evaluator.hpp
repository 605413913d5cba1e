#pragma once

#include <map>
#include <string>
#include <vector>

#include "framepbo/abc.hpp"
#include "framepbo/analysis.hpp"
#include "framepbo/frame.hpp"
#include "framepbo/perf_constraints.hpp"

namespace framepbo {

// Seismic demand settings. S_a feeds the coefficient-method target
// displacement; base_shear_coeff scales the seismic weight into the lateral
// load E of the elastic strength combinations.
struct SpectrumConfig {
  double S_a = 0.35;             // g units
  double base_shear_coeff = 0.08;
  double C1 = 1.0;
  double C2 = 1.0;
  double C3 = 1.0;
  double c0_override = 0.0;      // 0 = table value from the story count
  // Optional per-level S_a overrides; falls back to S_a.
  std::map<PerformanceLevel, double> sa_by_level;

  double sa_for(PerformanceLevel level) const;
};

struct PushoverSettings {
  double target_drift_fraction = 0.025;  // of total height
  int steps = 120;
  bool pdelta = true;
};

struct EvaluatorConfig {
  std::vector<PerformanceLevel> levels = {PerformanceLevel::IO,
                                          PerformanceLevel::LS,
                                          PerformanceLevel::CP};
  SpectrumConfig spectrum;
  PushoverSettings push;
  PenaltyParams penalty;
  PerformanceOptions perf;
};

// Per-level coefficient-method outcome.
struct LevelOutcome {
  PerformanceLevel level = PerformanceLevel::IO;
  double delta_t = 0.0;  // target roof displacement, m
  bool reached = false;
  StateAt state;
};

// Everything one evaluation produces, for reports and plots.
struct EvalDetail {
  double weight_kg = 0.0;
  std::vector<LoadCombination> combos;
  std::vector<LinearResult> linear;
  PushoverTrace trace;
  double T_i = 0.0;   // elastic fundamental period, s
  double T_e = 0.0;   // effective period, s
  BilinearFit fit;
  double base_shear_kn = 0.0;  // unit-factor lateral load of the combos
  std::vector<LevelOutcome> levels;
  PenaltyReport report;
};

// Full analysis pipeline for one design: sizing, elastic checks under the
// strength combinations, one pushover, coefficient-method targets per
// performance level, and the aggregated penalty report. Stateless per call;
// safe to invoke from parallel workers.
class DesignEvaluator {
 public:
  DesignEvaluator(const FrameModel& model, const SectionCatalogs& catalogs,
                  const AllowableTables& tables, const Materials& materials,
                  const SectionRules& rules, EvaluatorConfig config);

  PenaltyReport operator()(const DesignVector& design) const;
  EvalDetail evaluate(const DesignVector& design) const;

  // Catalog index bounds and dimension layout for the optimizer.
  void fill_bounds(ABCConfig& abc) const;

  const FrameModel& model() const { return *model_; }
  const EvaluatorConfig& config() const { return config_; }
  double seismic_weight_kn() const;

 private:
  const FrameModel* model_;
  const SectionCatalogs* catalogs_;
  const AllowableTables* tables_;
  Materials materials_;
  SectionRules rules_;
  EvaluatorConfig config_;
};

}  // namespace framepbo
