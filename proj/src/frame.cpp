#include "framepbo/frame.hpp"

#include <cmath>
#include <stdexcept>

namespace framepbo {

CaseId parse_case_id(const std::string& name) {
  if (name == "story4") return CaseId::story4;
  if (name == "story8") return CaseId::story8;
  if (name == "story12") return CaseId::story12;
  if (name == "tiny") return CaseId::tiny;
  if (name == "unit") return CaseId::unit;
  throw std::runtime_error("unknown case id '" + name +
                           "' (want story4, story8, story12, tiny, or unit)");
}

std::string case_name(CaseId id) {
  switch (id) {
    case CaseId::story4: return "story4";
    case CaseId::story8: return "story8";
    case CaseId::story12: return "story12";
    case CaseId::tiny: return "tiny";
    case CaseId::unit: return "unit";
  }
  return "?";
}

int FrameModel::node_at(int level, int col) const {
  if (level < 0 || level > n_stories || col < 0 || col > n_bays)
    throw std::runtime_error("node_at: grid position out of range");
  return level * (n_bays + 1) + col;
}

bool FrameModel::bay_has_wall(int bay) const {
  for (int b : wall_bays)
    if (b == bay) return true;
  return false;
}

double FrameModel::story_elevation(int level) const {
  double y = 0.0;
  for (int s = 0; s < level; ++s) y += stories[static_cast<size_t>(s)].height_m;
  return y;
}

double FrameModel::story_mass_t(int story) const {
  const StoryInfo& st = stories[static_cast<size_t>(story)];
  double plan_length = 0.0;
  for (double w : bays) plan_length += w;
  double area = plan_length * st.tributary_m;
  double weight_kn = (st.dead_kn_m2 + st.live_kn_m2) * area;
  return weight_kn / 9.81;  // kN -> tonnes
}

void FrameModel::validate() const {
  if (n_stories < 1 || n_bays < 1)
    throw std::runtime_error("frame: need at least one story and one bay");
  if (static_cast<int>(nodes.size()) != (n_stories + 1) * (n_bays + 1))
    throw std::runtime_error("frame: node grid size mismatch");
  if (static_cast<int>(stories.size()) != n_stories)
    throw std::runtime_error("frame: story list size mismatch");
  if (static_cast<int>(bays.size()) != n_bays)
    throw std::runtime_error("frame: bay list size mismatch");
  for (const auto& st : stories)
    if (st.height_m <= 0.0)
      throw std::runtime_error("frame: story heights must be positive");
  for (int b : wall_bays)
    if (b < 1 || b > n_bays)
      throw std::runtime_error("frame: wall bay index out of range");
  for (const auto& m : members) {
    if (m.ni < 0 || m.nj < 0 || m.ni >= static_cast<int>(nodes.size()) ||
        m.nj >= static_cast<int>(nodes.size()))
      throw std::runtime_error("frame: member references a missing node");
    if (m.story < 0 || m.story >= n_stories)
      throw std::runtime_error("frame: member story index out of range");
  }
}

namespace {

FrameModel build_grid(CaseId id, int n_stories, int n_bays,
                      const std::vector<int>& wall_bays,
                      const GeometryConfig& geom) {
  FrameModel f;
  f.case_id = id;
  f.n_stories = n_stories;
  f.n_bays = n_bays;
  f.wall_bays = wall_bays;
  f.bays.assign(static_cast<size_t>(n_bays), geom.bay_width_m);

  double dead = geom.dead_kg_m2 * geom.gravity_g / 1000.0;  // kN/m^2
  double live = geom.live_kg_m2 * geom.gravity_g / 1000.0;
  f.stories.assign(static_cast<size_t>(n_stories),
                   StoryInfo{geom.story_height_m, dead, live,
                             geom.tributary_width_m});

  for (int lvl = 0; lvl <= n_stories; ++lvl)
    for (int col = 0; col <= n_bays; ++col)
      f.nodes.push_back(
          {col * geom.bay_width_m, lvl * geom.story_height_m});

  for (int s = 0; s < n_stories; ++s) {
    for (int col = 0; col <= n_bays; ++col)
      f.members.push_back({MemberKind::column, f.node_at(s, col),
                           f.node_at(s + 1, col), s, s, 0});
    for (int bay = 1; bay <= n_bays; ++bay) {
      if (f.bay_has_wall(bay)) {
        // The wall replaces the bay's beams; floors tie in through rigid
        // links resolved at analysis time. Anchored on the bay's left nodes.
        f.members.push_back({MemberKind::wall, f.node_at(s, bay - 1),
                             f.node_at(s + 1, bay - 1), s, s, bay});
      } else {
        f.members.push_back({MemberKind::beam, f.node_at(s + 1, bay - 1),
                             f.node_at(s + 1, bay), s, s, bay});
      }
    }
  }
  f.validate();
  return f;
}

}  // namespace

FrameModel build_case(CaseId id, const GeometryConfig& geom) {
  switch (id) {
    case CaseId::story4:
      return build_grid(id, 4, 4, {2, 4}, geom);
    case CaseId::story8:
      return build_grid(id, 8, 3, {2}, geom);
    case CaseId::story12:
      return build_grid(id, 12, 3, {2}, geom);
    case CaseId::tiny:
      return build_grid(id, 2, 1, {}, geom);
    case CaseId::unit:
      return build_grid(id, 1, 1, {}, geom);
  }
  throw std::runtime_error("unknown case id");
}

LoadCombination make_combination(ComboTag tag, int e_sign) {
  switch (tag) {
    case ComboTag::ACI1: return {tag, 1.2, 1.6, 0.0, 0};
    case ComboTag::ACI2: return {tag, 1.2, 1.0, 1.4, e_sign};
    case ComboTag::ACI3: return {tag, 0.9, 0.0, 1.4, e_sign};
    case ComboTag::Gstrength: return {tag, 1.2, 1.6, 0.0, 0};
    case ComboTag::Gpbd: return {tag, 1.1, 1.1, 0.0, 0};
  }
  throw std::runtime_error("unknown combination tag");
}

double factored_load(const LoadCombination& combo, double D, double L,
                     double E) {
  double e_term = combo.e_factor == 0.0 ? 0.0 : combo.e_factor * E;
  return combo.d_factor * D + combo.l_factor * L + e_term;
}

std::string combo_name(const LoadCombination& combo) {
  std::string base;
  switch (combo.tag) {
    case ComboTag::ACI1: base = "1.2D+1.6L"; break;
    case ComboTag::ACI2: base = "1.2D+1.0L"; break;
    case ComboTag::ACI3: base = "0.9D"; break;
    case ComboTag::Gstrength: base = "G-strength"; break;
    case ComboTag::Gpbd: base = "G-pbd"; break;
  }
  if (combo.e_factor != 0.0)
    base += combo.e_sign >= 0 ? "+1.4E" : "-1.4E";
  return base;
}

std::vector<LoadCombination> strength_combinations() {
  return {make_combination(ComboTag::ACI1),
          make_combination(ComboTag::ACI2, +1),
          make_combination(ComboTag::ACI2, -1),
          make_combination(ComboTag::ACI3, +1),
          make_combination(ComboTag::ACI3, -1)};
}

SizedFrame apply_design(const FrameModel& model, const DesignVector& design,
                        const SectionCatalogs& catalogs, const Materials& mat,
                        const SectionRules& rules) {
  if (static_cast<int>(design.beam_group_ids.size()) !=
          model.beam_group_count() ||
      static_cast<int>(design.column_group_ids.size()) !=
          model.column_group_count() ||
      static_cast<int>(design.wall_group_ids.size()) !=
          model.wall_group_count())
    throw std::runtime_error("design vector group counts do not match frame");

  SizedFrame sized;
  sized.model = &model;
  sized.design = design;
  sized.materials = mat;
  sized.rules = rules;

  double Ec_kpa = mat.elastic_modulus_concrete() * 1e3;  // MPa -> kPa

  sized.column_diagrams.resize(design.column_group_ids.size());
  for (size_t g = 0; g < design.column_group_ids.size(); ++g)
    sized.column_diagrams[g] = build_interaction(
        catalogs.columns.by_id(design.column_group_ids[g]), mat, rules);

  for (const Member& m : model.members) {
    SizedMember sm;
    sm.member = &m;
    const FrameNode& a = model.nodes[static_cast<size_t>(m.ni)];
    const FrameNode& b = model.nodes[static_cast<size_t>(m.nj)];
    sm.length_m = std::hypot(b.x - a.x, b.y - a.y);

    switch (m.kind) {
      case MemberKind::beam: {
        sm.beam_rec = catalogs.beams.by_id(
            design.beam_group_ids[static_cast<size_t>(m.group)]);
        sm.caps = derive_beam_capacities(sm.beam_rec, mat, rules);
        sm.A_g_m2 = sm.caps.A_g * 1e-6;
        sm.A_st_m2 = sm.caps.A_s_total * 1e-6;
        sm.I_eff_m4 = sm.caps.I_eff * 1e-12;
        break;
      }
      case MemberKind::column: {
        sm.column_rec = catalogs.columns.by_id(
            design.column_group_ids[static_cast<size_t>(m.group)]);
        sm.caps = derive_column_capacities(sm.column_rec, mat, rules, 0.0);
        sm.A_g_m2 = sm.caps.A_g * 1e-6;
        sm.A_st_m2 = sm.caps.A_s_total * 1e-6;
        sm.I_eff_m4 = sm.caps.I_eff * 1e-12;
        break;
      }
      case MemberKind::wall: {
        sm.wall_rec = catalogs.walls.by_id(
            design.wall_group_ids[static_cast<size_t>(m.group)]);
        double l_w_mm = model.bays[static_cast<size_t>(m.bay - 1)] * 1e3;
        sm.wall_data = derive_wall_section(sm.wall_rec, mat, rules, l_w_mm);
        sm.A_g_m2 = sm.wall_data.A_g * 1e-6;
        sm.A_st_m2 = sm.wall_data.A_s_total * 1e-6;
        sm.I_eff_m4 = sm.wall_data.I_eff * 1e-12;
        break;
      }
    }
    sm.EA_kn = Ec_kpa * sm.A_g_m2;
    sm.EI_kn_m2 = Ec_kpa * sm.I_eff_m4;
    sized.members.push_back(sm);
  }
  return sized;
}

double structure_weight(const SizedFrame& sized) {
  double total = 0.0;
  for (const SizedMember& sm : sized.members) {
    total += sized.materials.rho_concrete * sm.length_m * sm.A_g_m2;
    total += sized.materials.rho_steel * sm.length_m * sm.A_st_m2;
  }
  return total;
}

}  // namespace framepbo
