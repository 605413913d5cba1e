#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace framepbo {

struct Materials {
  double fc_prime_mpa = 30.0;
  double fy_mpa = 400.0;
  double ec_mpa = 0.0;  // 0 -> derived as 4700*sqrt(f'c)
  double es_mpa = 200000.0;
  double rho_steel = 7850.0;     // kg/m^3
  double rho_concrete = 2400.0;  // kg/m^3
  double phi_flexure = 0.90;
  double phi_compression = 0.65;
  double phi_shear = 0.75;

  double elastic_modulus_concrete() const;
  double beta1() const;          // stress-block depth factor
  double rho_balanced() const;   // balanced reinforcement ratio
  void validate() const;         // throws on nonphysical values
};

// Detailing conventions shared by all capacity derivations.
struct SectionRules {
  double cover_mm = 40.0;
  double stirrup_diameter_mm = 10.0;
  double stirrup_spacing_mm = 150.0;
  double min_clear_spacing_mm = 25.0;
  double beam_ieff_factor = 0.35;
  double column_ieff_factor = 0.70;
  double wall_ieff_factor = 0.70;
  int interaction_points = 21;
  int wall_boundary_bars = 8;    // longitudinal bars per boundary element
  int wall_curtains = 2;         // vertical-bar curtains in the web
};

struct BarGroup {
  int count = 0;
  double diameter_mm = 0.0;
  double area_mm2() const;
};

struct BeamSectionRecord {
  int id = 0;
  double depth_mm = 0.0;
  double width_mm = 0.0;
  BarGroup bot_bars;
  BarGroup top_bars;
  bool reconstructed = false;
};

struct ColumnSectionRecord {
  int id = 0;
  double side_mm = 0.0;
  BarGroup bars;
  bool reconstructed = false;
};

struct WallSectionRecord {
  int id = 0;
  double t_w_mm = 0.0;
  double t_f_mm = 0.0;
  double s_sh_mm = 0.0;
  double b_f_mm = 0.0;
  double bar_diameter_mm = 0.0;
  bool reconstructed = false;
  bool has_boundary() const { return t_f_mm > 0.0; }
};

struct SectionCapacities {
  double A_g = 0.0;        // gross area, mm^2
  double A_s_total = 0.0;  // longitudinal steel, mm^2
  double rho = 0.0;
  double I_eff = 0.0;      // mm^4
  double M_n_pos = 0.0;    // kN.m
  double M_n_neg = 0.0;    // kN.m
  double P_n_max = 0.0;    // kN (0.80 cap for tied columns)
  double V_n = 0.0;        // kN
  double V_s = 0.0;        // stirrup contribution, kN
  double V_s_max = 0.0;    // stirrup cap, kN
  double eps_t = 0.0;      // tension-steel strain at nominal flexure
  double A_st_min = 0.0;   // mm^2
  double S = 0.0;          // clear bar spacing, mm
  double S_min = 0.0;      // required clear spacing, mm
  double rho_bal = 0.0;
};

// One axial-moment sample of a column interaction diagram. Axial force is
// compression-positive, in kN; moment in kN.m.
struct InteractionPoint {
  double P = 0.0;
  double M = 0.0;
};

struct InteractionDiagram {
  std::vector<InteractionPoint> points;  // ordered by increasing P
  double moment_at(double P) const;      // linear interpolation, clamped
};

template <typename Record>
struct Catalog {
  std::vector<Record> rows;                 // stored by id, ids 1..n contiguous
  std::vector<int> ids_by_unit_weight;      // nondecreasing steel+concrete weight
  std::vector<std::string> warnings;        // e.g. rho outside [0.01, 0.08]

  const Record& by_id(int id) const;
  int size() const { return static_cast<int>(rows.size()); }
};

struct SectionCatalogs {
  Catalog<BeamSectionRecord> beams;
  Catalog<ColumnSectionRecord> columns;
  Catalog<WallSectionRecord> walls;
};

double bar_area(double diameter_mm);

// Loads the three catalogs from `dir` (beam_sections.csv, column_sections.csv,
// wall_sections.csv). Throws with the offending row on any invariant breach.
SectionCatalogs load_catalogs(const std::string& dir);

Catalog<BeamSectionRecord> load_beam_catalog(const std::string& path);
Catalog<ColumnSectionRecord> load_column_catalog(const std::string& path);
Catalog<WallSectionRecord> load_wall_catalog(const std::string& path);

void save_beam_catalog(const std::string& path, const Catalog<BeamSectionRecord>&);
void save_column_catalog(const std::string& path, const Catalog<ColumnSectionRecord>&);
void save_wall_catalog(const std::string& path, const Catalog<WallSectionRecord>&);

// Rectangular stress-block flexure with strain compatibility, V_c+V_s shear.
SectionCapacities derive_beam_capacities(const BeamSectionRecord& rec,
                                         const Materials& mat,
                                         const SectionRules& rules);

// Column strengths at a given factored axial load (compression positive, kN).
SectionCapacities derive_column_capacities(const ColumnSectionRecord& rec,
                                           const Materials& mat,
                                           const SectionRules& rules,
                                           double P_u_kn);

InteractionDiagram build_interaction(const ColumnSectionRecord& rec,
                                     const Materials& mat,
                                     const SectionRules& rules);

struct WallTerms {
  double axial_flexural = 0.0;  // ((A_s - A'_s) f_y + P) / (t_w l_w f'_c)
  double shear = 0.0;           // V / (t_w l_w sqrt(f'_c)); N, mm, MPa units
  bool has_boundary = false;
};

WallTerms derive_wall_terms(const WallSectionRecord& rec, const Materials& mat,
                            double wall_length_mm, double P_kn, double V_kn);

// Wall gross/steel areas and stiffness used for weight and the wide-column
// analogy; boundary elements contribute per SectionRules.
struct WallSectionData {
  double A_g = 0.0;        // mm^2
  double A_s_total = 0.0;  // mm^2
  double I_g = 0.0;        // mm^4 about the in-plane axis
  double I_eff = 0.0;
  double V_n = 0.0;        // kN
};

WallSectionData derive_wall_section(const WallSectionRecord& rec,
                                    const Materials& mat,
                                    const SectionRules& rules,
                                    double wall_length_mm);

// Wall in-plane flexural strength from strain compatibility (kN.m) at the
// given axial load; used for the wide-column hinge yield moment.
double wall_moment_capacity(const WallSectionRecord& rec, const Materials& mat,
                            const SectionRules& rules, double wall_length_mm,
                            double P_kn);

}  // namespace framepbo
