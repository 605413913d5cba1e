#include "framepbo/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace framepbo {

double SpectrumConfig::sa_for(PerformanceLevel level) const {
  auto it = sa_by_level.find(level);
  return it == sa_by_level.end() ? S_a : it->second;
}

DesignEvaluator::DesignEvaluator(const FrameModel& model,
                                 const SectionCatalogs& catalogs,
                                 const AllowableTables& tables,
                                 const Materials& materials,
                                 const SectionRules& rules,
                                 EvaluatorConfig config)
    : model_(&model),
      catalogs_(&catalogs),
      tables_(&tables),
      materials_(materials),
      rules_(rules),
      config_(std::move(config)) {
  if (config_.levels.empty())
    throw std::runtime_error("evaluator: at least one performance level");
  materials_.validate();
}

double DesignEvaluator::seismic_weight_kn() const {
  double w = 0.0;
  for (int s = 0; s < model_->n_stories; ++s)
    w += model_->story_mass_t(s) * GeometryConfig{}.gravity_g;
  return w;
}

void DesignEvaluator::fill_bounds(ABCConfig& abc) const {
  abc.bounds.clear();
  abc.beam_dims = model_->beam_group_count();
  abc.column_dims = model_->column_group_count();
  abc.wall_dims = model_->wall_group_count();
  for (int k = 0; k < abc.beam_dims; ++k)
    abc.bounds.push_back({1.0, static_cast<double>(catalogs_->beams.size())});
  for (int k = 0; k < abc.column_dims; ++k)
    abc.bounds.push_back(
        {1.0, static_cast<double>(catalogs_->columns.size())});
  for (int k = 0; k < abc.wall_dims; ++k)
    abc.bounds.push_back({1.0, static_cast<double>(catalogs_->walls.size())});
}

PenaltyReport DesignEvaluator::operator()(const DesignVector& design) const {
  return evaluate(design).report;
}

EvalDetail DesignEvaluator::evaluate(const DesignVector& design) const {
  EvalDetail detail;
  SizedFrame sized =
      apply_design(*model_, design, *catalogs_, materials_, rules_);
  detail.weight_kg = structure_weight(sized);

  // Elastic demands under the strength combinations.
  detail.base_shear_kn = config_.spectrum.base_shear_coeff * seismic_weight_kn();
  detail.combos = strength_combinations();
  LateralPattern pattern = lateral_pattern(sized);
  detail.linear.reserve(detail.combos.size());
  for (const LoadCombination& combo : detail.combos)
    detail.linear.push_back(
        linear_static(sized, combo, detail.base_shear_kn, &pattern));

  std::vector<double> c = strength_violations(sized, detail.combos,
                                              detail.linear);

  // One pushover serves every performance level.
  PushoverControl control;
  control.target_roof_disp_m =
      config_.push.target_drift_fraction * model_->total_height();
  control.steps = config_.push.steps;
  control.pdelta = config_.push.pdelta;
  detail.trace = pushover(sized, pattern, control);

  detail.T_i = rayleigh_period(sized, pattern);
  bool curve_ok = true;
  try {
    detail.fit = fit_bilinear(detail.trace);
    detail.T_e = effective_period(detail.T_i, detail.fit.K_i, detail.fit.K_e);
  } catch (const std::exception&) {
    curve_ok = false;  // degenerate capacity curve: levels become unreachable
  }

  std::vector<LevelDemand> demands;
  double c0 = config_.spectrum.c0_override > 0.0
                  ? config_.spectrum.c0_override
                  : c0_factor(model_->n_stories);
  for (PerformanceLevel level : config_.levels) {
    LevelOutcome outcome;
    outcome.level = level;
    if (curve_ok) {
      TargetDisplacementInputs in;
      in.C0 = c0;
      in.C1 = config_.spectrum.C1;
      in.C2 = config_.spectrum.C2;
      in.C3 = config_.spectrum.C3;
      in.S_a = config_.spectrum.sa_for(level);
      in.T_e = detail.T_e;
      outcome.delta_t = target_displacement(in);
    } else {
      // Force the unreached-target penalty through an impossible demand.
      outcome.delta_t = 10.0 * model_->total_height();
    }
    outcome.state = state_at(detail.trace, outcome.delta_t);
    outcome.reached = outcome.state.reached;
    detail.levels.push_back(outcome);
    demands.push_back({level, &detail.trace, outcome.delta_t});
  }

  std::vector<double> perf = performance_violations(
      sized, *tables_, demands, detail.combos, detail.linear, config_.perf);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = std::max(c[i], perf[i]);

  detail.report = make_report(detail.weight_kg, c, config_.penalty);
  return detail;
}

}  // namespace framepbo
