#pragma once

#include <array>
#include <string>
#include <vector>

#include "framepbo/analysis.hpp"
#include "framepbo/frame.hpp"

namespace framepbo {

enum class PerformanceLevel { IO, LS, CP };

PerformanceLevel parse_level(const std::string& name);
std::string level_name(PerformanceLevel level);
inline constexpr std::array<PerformanceLevel, 3> kAllLevels = {
    PerformanceLevel::IO, PerformanceLevel::LS, PerformanceLevel::CP};

// Maximum inter-story drift ratio at each performance level.
double drift_limit(PerformanceLevel level);

// The rotation tables band the shear term V/(b d sqrt(f'c)) at 3 and 6 in
// sqrt(psi) units; section math upstream works in N, mm, MPa.
double shear_ratio_to_psi(double ratio_mpa);

struct RotationCell {
  double io = 0.0;
  double ls = 0.0;
  double cp = 0.0;
  double at(PerformanceLevel level) const;
};

// One printed row of a plastic-rotation allowable table: a (demand band,
// shear band) corner for a member kind and confinement state.
struct RotationRow {
  MemberKind kind = MemberKind::column;
  bool confined = true;    // transverse 'C' (beams, columns), boundary YES (walls)
  double demand_edge = 0.0;
  double shear_edge = 0.0;
  RotationCell limits;
};

struct AllowableTables {
  std::array<double, 3> drift = {0.005, 0.01, 0.02};  // IO, LS, CP
  std::vector<RotationRow> rows;
  std::vector<std::string> warnings;           // non-fatal, e.g. monotonicity
  std::vector<std::string> overrides_applied;  // logged cell substitutions

  double drift_limit(PerformanceLevel level) const;
};

// Loads drift and rotation allowables from a single CSV fixture; throws on
// malformed rows, missing band corners, or nonpositive limits. Non-monotone
// IO <= LS <= CP rows produce warnings, not errors.
AllowableTables load_allowables(const std::string& path);

// Substitutes individual cells from an override file of the same format;
// every applied substitution is logged. Unmatched rows are errors.
void apply_allowable_overrides(AllowableTables& tables,
                               const std::string& path);

// Plastic-rotation allowable: exact printed value on a band edge, bilinear
// interpolation between bounding rows, clamped to the nearest row outside
// the printed bands. shear_ratio is in the tables' sqrt(psi) units.
double rotation_limit(const AllowableTables& tables, MemberKind kind,
                      double demand_ratio, bool confined, double shear_ratio,
                      PerformanceLevel level);

struct PenaltyParams {
  double K = 1.0;
  double eps = 2.0;
};

inline constexpr int kNumConstraints = 21;

struct PenaltyReport {
  std::vector<double> c;  // 21 violation terms; c[i] holds c_(i+1)
  double C = 0.0;         // aggregate violation
  double F = 0.0;         // raw structure weight, kg
  double phi = 0.0;       // penalized objective
};

// Strength and detailing violations c_2..c_18 from the elastic demand
// envelope over the given combinations. Returns a full 21-slot vector with
// the drift/rotation slots left at zero.
std::vector<double> strength_violations(
    const SizedFrame& sized, const std::vector<LoadCombination>& combos,
    const std::vector<LinearResult>& results);

// Pushover demand for one performance level: the trace and the target roof
// displacement at which the level is checked.
struct LevelDemand {
  PerformanceLevel level = PerformanceLevel::IO;
  const PushoverTrace* trace = nullptr;
  double target_disp_m = 0.0;
};

struct PerformanceOptions {
  double elastic_drift_limit = 0.0045;
  double unreached_violation = 10.0;  // charged when a target is not reached
};

// Drift and plastic-rotation violations c_1, c_19, c_20, c_21. The elastic
// results (paired with their combinations) feed the elastic drift check;
// only combinations carrying lateral load participate.
std::vector<double> performance_violations(
    const SizedFrame& sized, const AllowableTables& tables,
    const std::vector<LevelDemand>& levels,
    const std::vector<LoadCombination>& elastic_combos,
    const std::vector<LinearResult>& elastic_results,
    const PerformanceOptions& opt = {});

// Sum of violation terms; throws on a negative entry.
double aggregate(const std::vector<double>& c);

// phi = F * (1 + K*C)^eps.
double penalize(double F, double C, const PenaltyParams& params = {});

PenaltyReport make_report(double weight_kg, const std::vector<double>& c,
                          const PenaltyParams& params = {});

}  // namespace framepbo
