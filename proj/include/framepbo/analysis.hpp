#pragma once

#include <string>
#include <vector>

#include "framepbo/frame.hpp"

namespace framepbo {

// Normalized story force profile (sums to one; index 0 = first story).
struct LateralPattern {
  std::vector<double> story_forces;
};

// Inverted-triangular profile, F_k proportional to m_k * h_k.
LateralPattern lateral_pattern(const SizedFrame& sized);

struct MemberEndForces {
  double P = 0.0;        // axial, compression positive, kN
  double V = 0.0;        // largest absolute shear, kN
  double M_i = 0.0;      // end moments in basic convention, kN.m
  double M_j = 0.0;
  double M_max = 0.0;    // largest absolute bending moment anywhere
  double M_span_pos = 0.0;  // peak sagging demand (beams)
  double M_span_neg = 0.0;  // peak hogging demand (beams)
};

struct LinearResult {
  bool ok = false;
  std::string error;
  // Displacements of the frame grid nodes.
  std::vector<double> ux, uy, rot;
  std::vector<MemberEndForces> forces;  // parallel to model members
  std::vector<double> story_disp;       // lateral displacement per level 1..ns
  std::vector<double> story_drift;      // ratio per story
  double roof_disp = 0.0;
};

// Elastic direct-stiffness solution for one load combination. The lateral
// load E equals the normalized pattern scaled by base_shear_kn (then by the
// combination's own factor and sign). Passing a pattern overrides the
// mass-proportional default.
LinearResult linear_static(const SizedFrame& sized,
                           const LoadCombination& combo,
                           double base_shear_kn = 0.0,
                           const LateralPattern* pattern = nullptr);

struct PushoverControl {
  double target_roof_disp_m = 0.3;
  int steps = 200;
  int max_newton = 60;
  double tolerance = 1e-9;
  bool pdelta = true;
  double hinge_hardening = 1e-3;  // post-yield tangent as a fraction of 6EI/L
  LoadCombination gravity = make_combination(ComboTag::Gpbd);
};

struct PushStep {
  double lambda = 0.0;      // pattern multiplier = base shear (pattern sums to 1)
  double base_shear = 0.0;  // kN
  double roof_disp = 0.0;   // m
  std::vector<double> story_disp;   // m, levels 1..ns
  std::vector<double> drift;        // ratio per story
  std::vector<double> hinge_rot;    // plastic rotation, 2 per member (i then j)
};

struct PushoverTrace {
  std::vector<PushStep> steps;      // step 0 is the gravity state
  bool completed = false;           // reached the displacement target
  std::string termination;          // "target", "instability", ...
  double K_i = 0.0;                 // initial lateral stiffness, kN/m
  std::vector<double> hinge_yield_pos;  // capacity for positive basic moment
  std::vector<double> hinge_yield_neg;  // capacity for negative basic moment
  std::vector<double> gravity_axial;    // member axial at the gravity state, kN
  int n_stories = 0;
};

PushoverTrace pushover(const SizedFrame& sized, const LateralPattern& pattern,
                       const PushoverControl& control);

void write_trace_csv(const std::string& path, const PushoverTrace& trace);

struct StateAt {
  bool reached = false;
  std::vector<double> drift;      // per story
  std::vector<double> hinge_rot;  // per hinge (2 per member)
  double base_shear = 0.0;
};

// Linear interpolation of the trace at the requested roof displacement.
StateAt state_at(const PushoverTrace& trace, double roof_disp);

// Rayleigh-quotient fundamental period (s) under the lateral pattern.
double rayleigh_period(const SizedFrame& sized, const LateralPattern& pattern);

struct BilinearFit {
  double K_i = 0.0;   // initial stiffness, kN/m
  double K_e = 0.0;   // effective (secant at 0.6 V_y) stiffness, kN/m
  double V_y = 0.0;   // yield strength of the bilinear idealization, kN
  double u_y = 0.0;   // yield displacement, m
};

// Equal-energy bilinear idealization of the capacity curve; the effective
// stiffness is the secant through 0.6 V_y.
BilinearFit fit_bilinear(const PushoverTrace& trace);

double effective_period(double T_i, double K_i, double K_e);

struct TargetDisplacementInputs {
  double C0 = 1.0;
  double C1 = 1.0;
  double C2 = 1.0;
  double C3 = 1.0;
  double S_a = 1.0;       // spectral acceleration, g units
  double T_e = 1.0;       // s
  double g = 9.81;        // m/s^2
};

double target_displacement(const TargetDisplacementInputs& inputs);

// Piecewise-linear C0 versus story count (clamped at the table ends).
double c0_factor(int n_stories);

}  // namespace framepbo
