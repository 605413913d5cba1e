#pragma once

#include <string>
#include <vector>

#include "framepbo/sections.hpp"

namespace framepbo {

enum class CaseId { story4, story8, story12, tiny, unit };

CaseId parse_case_id(const std::string& name);
std::string case_name(CaseId id);

enum class MemberKind { beam, column, wall };

struct GeometryConfig {
  double bay_width_m = 5.0;
  double story_height_m = 3.0;
  double dead_kg_m2 = 600.0;
  double live_kg_m2 = 200.0;
  double tributary_width_m = 5.0;
  double gravity_g = 9.81;  // m/s^2
};

struct FrameNode {
  double x = 0.0;  // m
  double y = 0.0;  // m
};

struct Member {
  MemberKind kind = MemberKind::beam;
  int ni = 0;      // lower / left grid node
  int nj = 0;      // upper / right grid node
  int story = 0;   // 0-based story index (beams: supporting story below)
  int group = 0;   // index into the DesignVector array of this kind
  int bay = 0;     // 1-based bay index (walls and beams)
};

struct StoryInfo {
  double height_m = 0.0;
  double dead_kn_m2 = 0.0;
  double live_kn_m2 = 0.0;
  double tributary_m = 0.0;
};

struct FrameModel {
  CaseId case_id = CaseId::tiny;
  int n_stories = 0;
  int n_bays = 0;
  std::vector<FrameNode> nodes;  // (stories+1) x (bays+1) grid, row-major
  std::vector<Member> members;
  std::vector<StoryInfo> stories;
  std::vector<double> bays;      // widths, m
  std::vector<int> wall_bays;    // 1-based bay indices hosting walls
  // Explicit (master, slave) rigid in-plane links between grid nodes, in
  // addition to the ones the wall idealization creates internally.
  std::vector<std::pair<int, int>> rigid_links;

  int node_at(int level, int col) const;  // level 0 = base
  bool bay_has_wall(int bay) const;
  int beam_group_count() const { return n_stories; }
  int column_group_count() const { return n_stories; }
  int wall_group_count() const {
    return wall_bays.empty() ? 0 : n_stories;
  }
  double story_elevation(int level) const;  // y of the given node row
  double total_height() const { return story_elevation(n_stories); }
  // Seismic mass of one story in tonnes (dead + live over the tributary strip).
  double story_mass_t(int story) const;
  void validate() const;  // checks the structural invariants, throws on breach
};

FrameModel build_case(CaseId id, const GeometryConfig& geom);

struct DesignVector {
  std::vector<int> beam_group_ids;
  std::vector<int> column_group_ids;
  std::vector<int> wall_group_ids;
  int dimension() const {
    return static_cast<int>(beam_group_ids.size() + column_group_ids.size() +
                            wall_group_ids.size());
  }
  bool operator==(const DesignVector&) const = default;
};

enum class ComboTag { ACI1, ACI2, ACI3, Gstrength, Gpbd };

struct LoadCombination {
  ComboTag tag = ComboTag::Gpbd;
  double d_factor = 0.0;
  double l_factor = 0.0;
  double e_factor = 0.0;
  // +1 applies the lateral pattern left-to-right, -1 mirrored; gravity tags 0.
  int e_sign = 1;
};

LoadCombination make_combination(ComboTag tag, int e_sign = 1);
double factored_load(const LoadCombination& combo, double D, double L,
                     double E);
std::string combo_name(const LoadCombination& combo);

// All combinations checked during evaluation: 1.2D+1.6L, 1.2D+1.0L+-1.4E,
// 0.9D+-1.4E.
std::vector<LoadCombination> strength_combinations();

struct SizedMember {
  const Member* member = nullptr;
  double length_m = 0.0;
  double A_g_m2 = 0.0;       // gross concrete area
  double A_st_m2 = 0.0;      // longitudinal steel area
  double I_eff_m4 = 0.0;
  double EA_kn = 0.0;
  double EI_kn_m2 = 0.0;
  SectionCapacities caps;    // beams/columns (walls use wall_* fields)
  // Resolved records; only the one matching the kind is meaningful.
  BeamSectionRecord beam_rec;
  ColumnSectionRecord column_rec;
  WallSectionRecord wall_rec;
  WallSectionData wall_data;
};

struct SizedFrame {
  const FrameModel* model = nullptr;
  DesignVector design;
  std::vector<SizedMember> members;  // parallel to model->members
  std::vector<InteractionDiagram> column_diagrams;  // one per column group
  Materials materials;
  SectionRules rules;
};

// Resolves every member's catalog record and derived capacities. Column
// moment capacities are axial-load dependent and looked up later from the
// interaction diagrams cached here.
SizedFrame apply_design(const FrameModel& model, const DesignVector& design,
                        const SectionCatalogs& catalogs, const Materials& mat,
                        const SectionRules& rules);

double structure_weight(const SizedFrame& sized);

}  // namespace framepbo
