#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "framepbo/frame.hpp"
#include "framepbo/perf_constraints.hpp"
#include "framepbo/rng.hpp"

namespace framepbo {

struct Bound {
  double lo = 0.0;
  double hi = 0.0;
};

struct ABCConfig {
  int colony_size = 30;        // N_p; half employed, half onlooker
  int abandonment_limit = 20;  // I_L
  int max_iterations = 100;    // I_max
  double vcp = 0.3;            // fraction of dimensions perturbed per move
  int runs = 1;                // independent repetitions
  std::uint64_t seed = 1;
  std::vector<Bound> bounds;   // one per design dimension
  // How decoded components split into the design vector, in order: beam
  // groups, then column groups, then wall groups.
  int beam_dims = 0;
  int column_dims = 0;
  int wall_dims = 0;
  double divergence_window = 0.10;  // fraction of I_max before the check
  bool abort_on_divergence = false;
  int threads = 1;

  int dimension() const { return static_cast<int>(bounds.size()); }
  int n_sources() const { return colony_size / 2; }
  void validate() const;  // throws on inconsistent parameters
};

struct FoodSource {
  std::vector<double> x;
  double f = 0.0;  // penalized objective of the decoded design
  PenaltyReport report;
  int trial = 0;
};

// Deterministic evaluation of a decoded design.
using Evaluator = std::function<PenaltyReport(const DesignVector&)>;

// Thrown when the evaluator fails; carries the offending design.
struct EvaluationError : std::runtime_error {
  EvaluationError(const std::string& what, DesignVector design)
      : std::runtime_error(what), design(std::move(design)) {}
  DesignVector design;
};

// Nearest-integer rounding of each component, clamped to its bound range,
// split into the design vector per the config layout.
DesignVector decode(const std::vector<double>& x, const ABCConfig& config);

// Uniform draws between the bounds for each of N_p/2 sources. Fitness fields
// are left unevaluated.
std::vector<FoodSource> init_population(const ABCConfig& config, Rng& rng);

// Perturbs a VCP-fraction of dimensions (at least one) toward/away from the
// partner; untouched dimensions are copied and out-of-bound results clamp.
std::vector<double> neighbor_move(const FoodSource& source,
                                  const FoodSource& partner,
                                  const ABCConfig& config, Rng& rng);

// Candidate survives on less-or-equal objective (trial reset); otherwise the
// old source survives with an incremented trial counter.
FoodSource greedy_select(const FoodSource& old_source,
                         const FoodSource& candidate);

// p_i = 0.9 * f_min / f_i + 0.1; throws on nonpositive fitness.
double onlooker_probability(double f_i, double f_min);

// Index of the single source to abandon this iteration: the largest trial
// count at or above the limit (lowest index on ties), or -1.
int scout_index(const std::vector<FoodSource>& sources, int abandonment_limit);

// Fresh uniform redraw when the trial budget is exhausted; returns whether
// the source was replaced. The caller re-evaluates on replacement.
bool scout_replace(FoodSource& source, const ABCConfig& config, Rng& rng);

struct IterationStat {
  int iteration = 0;       // 0 = after initialization
  double best_phi = 0.0;   // best-so-far penalized objective
  double best_weight = 0.0;
  double best_C = 0.0;
  int feasible_count = 0;  // sources in the current population with C = 0
};

struct RunResult {
  DesignVector best_design;
  PenaltyReport best_report;
  std::vector<IterationStat> history;  // entry 0 is the initial population
  bool diverged = false;
  long evaluations = 0;
  std::uint64_t seed = 0;
  std::vector<FoodSource> final_population;
};

struct MultiRunResult {
  std::vector<RunResult> runs;
  int best_run = 0;
  double mean_phi = 0.0;
  double stddev_phi = 0.0;
  const RunResult& best() const { return runs[static_cast<std::size_t>(best_run)]; }
};

// One seeded colony: initialization, then employed / onlooker / scout phases
// per iteration. Candidate evaluations may run on config.threads workers;
// all random draws happen sequentially before dispatch and results merge in
// issue order, so the outcome is independent of the worker count.
RunResult run_abc(const ABCConfig& config, const Evaluator& evaluator,
                  std::uint64_t seed);

// config.runs independent repetitions with derived seeds; best run selected
// by final objective (lowest index on ties).
MultiRunResult run_abc_multi(const ABCConfig& config,
                             const Evaluator& evaluator);

// Convergence history: iteration, best_phi, best_weight_kg, best_C,
// feasible_count.
void write_history_csv(const std::string& path, const RunResult& result);

}  // namespace framepbo
