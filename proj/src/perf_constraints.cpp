#include "framepbo/perf_constraints.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "framepbo/csvio.hpp"

namespace framepbo {
namespace {

constexpr double kPsiPerMpa = 145.03773800722;

double parse_positive(const std::string& cell, const std::string& what) {
  double v = 0.0;
  try {
    v = std::stod(cell);
  } catch (const std::exception&) {
    throw std::runtime_error("allowables: unparsable " + what + " '" + cell +
                             "'");
  }
  if (!(v > 0.0)) {
    throw std::runtime_error("allowables: nonpositive " + what + " '" + cell +
                             "'");
  }
  return v;
}

MemberKind parse_kind(const std::string& name) {
  if (name == "column") return MemberKind::column;
  if (name == "beam") return MemberKind::beam;
  if (name == "wall") return MemberKind::wall;
  throw std::runtime_error("allowables: unknown member kind '" + name + "'");
}

bool parse_confined(const std::string& cell) {
  if (cell == "C" || cell == "YES") return true;
  if (cell == "NC" || cell == "NO") return false;
  throw std::runtime_error("allowables: unknown confinement flag '" + cell +
                           "'");
}

std::string row_label(const RotationRow& row) {
  std::string kind = row.kind == MemberKind::column ? "column"
                     : row.kind == MemberKind::beam ? "beam"
                                                    : "wall";
  return kind + " demand " + format_double(row.demand_edge) + " shear " +
         format_double(row.shear_edge) +
         (row.confined ? " confined" : " unconfined");
}

RotationRow parse_rotation_row(const CsvTable& table, std::size_t r) {
  RotationRow row;
  row.kind = parse_kind(table.cell(r, "table"));
  row.confined = parse_confined(table.cell(r, "confinement"));
  row.demand_edge = std::stod(table.cell(r, "demand_band"));
  row.shear_edge = parse_positive(table.cell(r, "shear_band"), "shear band");
  row.limits.io = parse_positive(table.cell(r, "io"), "IO limit");
  row.limits.ls = parse_positive(table.cell(r, "ls"), "LS limit");
  row.limits.cp = parse_positive(table.cell(r, "cp"), "CP limit");
  return row;
}

// The four rows of one (kind, confined) block arranged by band corner.
struct RotationBlock {
  double demand_lo = 0.0, demand_hi = 0.0;
  double shear_lo = 0.0, shear_hi = 0.0;
  RotationCell ll, lh, hl, hh;  // demand(lo/hi) x shear(lo/hi)
};

RotationBlock assemble_block(const std::vector<const RotationRow*>& rows) {
  if (rows.size() != 4) {
    throw std::runtime_error(
        "allowables: a rotation table block needs exactly 4 band corners, "
        "got " +
        std::to_string(rows.size()));
  }
  std::set<double> demands, shears;
  for (const RotationRow* r : rows) {
    demands.insert(r->demand_edge);
    shears.insert(r->shear_edge);
  }
  if (demands.size() != 2 || shears.size() != 2) {
    throw std::runtime_error(
        "allowables: rotation block must span two demand and two shear "
        "bands");
  }
  RotationBlock block;
  block.demand_lo = *demands.begin();
  block.demand_hi = *demands.rbegin();
  block.shear_lo = *shears.begin();
  block.shear_hi = *shears.rbegin();
  for (const RotationRow* r : rows) {
    bool hi_d = r->demand_edge == block.demand_hi;
    bool hi_s = r->shear_edge == block.shear_hi;
    (hi_d ? (hi_s ? block.hh : block.hl) : (hi_s ? block.lh : block.ll)) =
        r->limits;
  }
  return block;
}

std::vector<const RotationRow*> block_rows(const AllowableTables& tables,
                                           MemberKind kind, bool confined) {
  std::vector<const RotationRow*> rows;
  for (const RotationRow& r : tables.rows)
    if (r.kind == kind && r.confined == confined) rows.push_back(&r);
  if (rows.empty()) {
    // The printed tables only cover conforming transverse reinforcement for
    // beams and columns; fall back to the rows that exist for the kind.
    for (const RotationRow& r : tables.rows)
      if (r.kind == kind) rows.push_back(&r);
  }
  return rows;
}

double clamp01(double t) { return std::min(1.0, std::max(0.0, t)); }

double fraction(double v, double lo, double hi) {
  if (hi <= lo) return 0.0;
  return clamp01((v - lo) / (hi - lo));
}

// Nonnegative one-sided violation of demand <= capacity, normalized by the
// capacity. A vanishing capacity still yields a finite (large) violation.
double over(double demand, double capacity) {
  double cap = std::max(capacity, 1e-9);
  return std::max(0.0, (demand - cap) / cap);
}

// Nonnegative violation of value >= floor, normalized by the floor.
double under(double value, double floor) {
  if (floor <= 0.0) return 0.0;
  return std::max(0.0, (floor - value) / floor);
}

double effective_depth_mm(double overall_mm, double bar_diameter_mm,
                          const SectionRules& rules) {
  return overall_mm - rules.cover_mm - rules.stirrup_diameter_mm -
         bar_diameter_mm / 2.0;
}

// Shear-demand ratio V/(b d sqrt(f'c)) in the tables' sqrt(psi) units, from
// kN / mm / MPa inputs.
double member_shear_ratio_psi(double V_kn, double b_mm, double d_mm,
                              double fc_mpa) {
  double ratio_mpa = V_kn * 1e3 / (b_mm * d_mm * std::sqrt(fc_mpa));
  return shear_ratio_to_psi(ratio_mpa);
}

// Plastic-mechanism shear estimate for a hinged member: both end capacities
// acting over the clear length.
double capacity_shear_kn(const PushoverTrace& trace, std::size_t member_idx,
                         double length_m) {
  double cap_i = std::max(trace.hinge_yield_pos[2 * member_idx],
                          trace.hinge_yield_neg[2 * member_idx]);
  double cap_j = std::max(trace.hinge_yield_pos[2 * member_idx + 1],
                          trace.hinge_yield_neg[2 * member_idx + 1]);
  return (cap_i + cap_j) / std::max(length_m, 1e-9);
}

}  // namespace

PerformanceLevel parse_level(const std::string& name) {
  std::string s;
  for (char ch : name)
    if (ch != '-' && ch != ' ') s.push_back(static_cast<char>(std::toupper(ch)));
  if (s == "IO") return PerformanceLevel::IO;
  if (s == "LS") return PerformanceLevel::LS;
  if (s == "CP") return PerformanceLevel::CP;
  throw std::runtime_error("unknown performance level '" + name + "'");
}

std::string level_name(PerformanceLevel level) {
  switch (level) {
    case PerformanceLevel::IO: return "IO";
    case PerformanceLevel::LS: return "LS";
    case PerformanceLevel::CP: return "CP";
  }
  return "?";
}

double drift_limit(PerformanceLevel level) {
  switch (level) {
    case PerformanceLevel::IO: return 0.005;
    case PerformanceLevel::LS: return 0.01;
    case PerformanceLevel::CP: return 0.02;
  }
  return 0.0;
}

double shear_ratio_to_psi(double ratio_mpa) {
  return ratio_mpa * std::sqrt(kPsiPerMpa);
}

double RotationCell::at(PerformanceLevel level) const {
  switch (level) {
    case PerformanceLevel::IO: return io;
    case PerformanceLevel::LS: return ls;
    case PerformanceLevel::CP: return cp;
  }
  return 0.0;
}

double AllowableTables::drift_limit(PerformanceLevel level) const {
  return drift[static_cast<std::size_t>(level)];
}

AllowableTables load_allowables(const std::string& path) {
  CsvTable table = read_csv(path);
  for (const char* col :
       {"table", "demand_band", "confinement", "shear_band", "io", "ls",
        "cp"}) {
    if (table.column(col) < 0)
      throw std::runtime_error("allowables: missing column '" +
                               std::string(col) + "' in " + path);
  }
  AllowableTables tables;
  bool have_drift = false;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const std::string& what = table.cell(r, "table");
    if (what == "drift") {
      tables.drift = {parse_positive(table.cell(r, "io"), "IO drift"),
                      parse_positive(table.cell(r, "ls"), "LS drift"),
                      parse_positive(table.cell(r, "cp"), "CP drift")};
      have_drift = true;
      continue;
    }
    tables.rows.push_back(parse_rotation_row(table, r));
  }
  if (!have_drift)
    throw std::runtime_error("allowables: no drift row in " + path);
  if (tables.rows.empty())
    throw std::runtime_error("allowables: no rotation rows in " + path);

  if (!(tables.drift[0] <= tables.drift[1] && tables.drift[1] <= tables.drift[2]))
    tables.warnings.push_back("drift limits are not monotone IO <= LS <= CP");
  for (const RotationRow& row : tables.rows) {
    if (!(row.limits.io <= row.limits.ls && row.limits.ls <= row.limits.cp)) {
      tables.warnings.push_back(
          "rotation limits not monotone IO <= LS <= CP for " +
          row_label(row) + " (kept as printed)");
    }
  }
  // Validate every block assembles into a 2x2 band grid.
  for (MemberKind kind :
       {MemberKind::column, MemberKind::beam, MemberKind::wall}) {
    std::set<bool> flags;
    for (const RotationRow& r : tables.rows)
      if (r.kind == kind) flags.insert(r.confined);
    for (bool confined : flags) assemble_block(block_rows(tables, kind, confined));
  }
  return tables;
}

void apply_allowable_overrides(AllowableTables& tables,
                               const std::string& path) {
  CsvTable table = read_csv(path);
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const std::string& what = table.cell(r, "table");
    if (what == "drift") {
      tables.drift = {parse_positive(table.cell(r, "io"), "IO drift"),
                      parse_positive(table.cell(r, "ls"), "LS drift"),
                      parse_positive(table.cell(r, "cp"), "CP drift")};
      tables.overrides_applied.push_back("drift limits replaced");
      continue;
    }
    RotationRow incoming = parse_rotation_row(table, r);
    bool matched = false;
    for (RotationRow& row : tables.rows) {
      if (row.kind == incoming.kind && row.confined == incoming.confined &&
          row.demand_edge == incoming.demand_edge &&
          row.shear_edge == incoming.shear_edge) {
        row.limits = incoming.limits;
        matched = true;
        tables.overrides_applied.push_back("replaced " + row_label(row));
        break;
      }
    }
    if (!matched)
      throw std::runtime_error(
          "allowables override: no matching row for " + row_label(incoming));
  }
}

double rotation_limit(const AllowableTables& tables, MemberKind kind,
                      double demand_ratio, bool confined, double shear_ratio,
                      PerformanceLevel level) {
  if (!std::isfinite(demand_ratio) || !std::isfinite(shear_ratio))
    throw std::runtime_error("rotation_limit: non-finite demand inputs");
  RotationBlock block = assemble_block(block_rows(tables, kind, confined));
  double td = fraction(demand_ratio, block.demand_lo, block.demand_hi);
  double ts = fraction(shear_ratio, block.shear_lo, block.shear_hi);
  double lo = block.ll.at(level) * (1.0 - ts) + block.lh.at(level) * ts;
  double hi = block.hl.at(level) * (1.0 - ts) + block.hh.at(level) * ts;
  return lo * (1.0 - td) + hi * td;
}

std::vector<double> strength_violations(
    const SizedFrame& sized, const std::vector<LoadCombination>& combos,
    const std::vector<LinearResult>& results) {
  if (combos.size() != results.size())
    throw std::runtime_error(
        "strength_violations: combos and results differ in length");
  const FrameModel& model = *sized.model;
  const Materials& mat = sized.materials;
  std::vector<double> c(kNumConstraints, 0.0);
  auto raise = [&c](int one_based, double v) {
    double& slot = c[static_cast<std::size_t>(one_based - 1)];
    slot = std::max(slot, v);
  };

  // Demand-driven checks, enveloped over every combination and member.
  for (std::size_t ci = 0; ci < results.size(); ++ci) {
    const LinearResult& res = results[ci];
    if (!res.ok)
      throw std::runtime_error("strength_violations: analysis failed (" +
                               combo_name(combos[ci]) + "): " + res.error);
    for (std::size_t m = 0; m < sized.members.size(); ++m) {
      const SizedMember& sm = sized.members[m];
      const MemberEndForces& f = res.forces[m];
      switch (sm.member->kind) {
        case MemberKind::column: {
          double phi_pn = mat.phi_compression * sm.caps.P_n_max;
          raise(2, over(std::max(0.0, f.P), phi_pn));
          const InteractionDiagram& diagram =
              sized.column_diagrams[static_cast<std::size_t>(
                  sm.member->group)];
          double m_n = diagram.moment_at(f.P);
          raise(3, over(f.M_max, mat.phi_compression * m_n));
          raise(4, over(f.V, mat.phi_shear * sm.caps.V_n));
          break;
        }
        case MemberKind::beam: {
          raise(13, over(f.M_span_pos, mat.phi_flexure * sm.caps.M_n_pos));
          raise(13, over(f.M_span_neg, mat.phi_flexure * sm.caps.M_n_neg));
          break;
        }
        case MemberKind::wall:
          break;  // walls are governed by the rotation and drift checks
      }
    }
  }

  // Sectional and geometric checks, independent of the demands.
  for (const SizedMember& sm : sized.members) {
    switch (sm.member->kind) {
      case MemberKind::column: {
        raise(5, under(sm.caps.rho, 0.01));
        raise(6, over(sm.caps.rho, 0.08));
        // Square sections: width equals depth, so the b <= h check is a
        // plain comparison that degenerates to zero.
        raise(10, over(sm.column_rec.side_mm, sm.column_rec.side_mm));
        raise(12, under(sm.caps.S, sm.caps.S_min));
        break;
      }
      case MemberKind::beam: {
        raise(14, over(sm.caps.V_s, sm.caps.V_s_max));
        double a_min_face = std::min(sm.beam_rec.top_bars.area_mm2(),
                                     sm.beam_rec.bot_bars.area_mm2());
        raise(15, under(a_min_face, sm.caps.A_st_min));
        raise(16, under(sm.caps.eps_t, 0.004));
        raise(17, under(sm.caps.S, sm.caps.S_min));
        raise(18, under(sm.beam_rec.depth_mm, sm.length_m * 1000.0 / 21.0));
        break;
      }
      case MemberKind::wall:
        break;
    }
  }

  // Story-to-story and beam-to-column geometry; sections are shared per
  // story group, so group records carry the comparison.
  std::vector<const ColumnSectionRecord*> col_by_story(
      static_cast<std::size_t>(model.n_stories), nullptr);
  std::vector<const BeamSectionRecord*> beam_by_story(
      static_cast<std::size_t>(model.n_stories), nullptr);
  for (const SizedMember& sm : sized.members) {
    auto s = static_cast<std::size_t>(sm.member->story);
    if (sm.member->kind == MemberKind::column)
      col_by_story[s] = &sm.column_rec;
    else if (sm.member->kind == MemberKind::beam)
      beam_by_story[s] = &sm.beam_rec;
  }
  for (int s = 0; s + 1 < model.n_stories; ++s) {
    const ColumnSectionRecord* lower = col_by_story[static_cast<std::size_t>(s)];
    const ColumnSectionRecord* upper =
        col_by_story[static_cast<std::size_t>(s + 1)];
    if (!lower || !upper) continue;
    raise(7, over(upper->side_mm, lower->side_mm));
    raise(8, over(upper->side_mm, lower->side_mm));
  }
  for (int s = 0; s < model.n_stories; ++s) {
    const BeamSectionRecord* beam = beam_by_story[static_cast<std::size_t>(s)];
    const ColumnSectionRecord* col = col_by_story[static_cast<std::size_t>(s)];
    if (!beam || !col) continue;
    raise(9, over(beam->width_mm, col->side_mm));
    // Braced slenderness with the clear height between beam soffits.
    double l_u_mm = model.stories[static_cast<std::size_t>(s)].height_m * 1000.0 -
                    beam->depth_mm;
    double r_mm = 0.3 * col->side_mm;
    raise(11, over(l_u_mm / r_mm, 100.0));
  }
  return c;
}

std::vector<double> performance_violations(
    const SizedFrame& sized, const AllowableTables& tables,
    const std::vector<LevelDemand>& levels,
    const std::vector<LoadCombination>& elastic_combos,
    const std::vector<LinearResult>& elastic_results,
    const PerformanceOptions& opt) {
  if (elastic_combos.size() != elastic_results.size())
    throw std::runtime_error(
        "performance_violations: combos and results differ in length");
  const Materials& mat = sized.materials;
  std::vector<double> c(kNumConstraints, 0.0);
  auto raise = [&c](int one_based, double v) {
    double& slot = c[static_cast<std::size_t>(one_based - 1)];
    slot = std::max(slot, v);
  };

  // Elastic story drift under the lateral-load-bearing combinations.
  for (std::size_t i = 0; i < elastic_results.size(); ++i) {
    if (elastic_combos[i].e_factor == 0.0) continue;
    const LinearResult& res = elastic_results[i];
    if (!res.ok)
      throw std::runtime_error("performance_violations: analysis failed (" +
                               combo_name(elastic_combos[i]) +
                               "): " + res.error);
    for (double drift : res.story_drift)
      raise(1, over(std::abs(drift), opt.elastic_drift_limit));
  }

  for (const LevelDemand& demand : levels) {
    const PushoverTrace& trace = *demand.trace;
    StateAt state = state_at(trace, demand.target_disp_m);
    if (!state.reached) {
      raise(19, opt.unreached_violation);
      continue;
    }
    double d_all = tables.drift_limit(demand.level);
    for (double drift : state.drift) raise(19, over(std::abs(drift), d_all));

    for (std::size_t m = 0; m < sized.members.size(); ++m) {
      const SizedMember& sm = sized.members[m];
      const Member& member = *sm.member;
      double P_grav = std::max(0.0, trace.gravity_axial[m]);
      for (int end = 0; end < 2; ++end) {
        double rot = std::abs(state.hinge_rot[2 * m + static_cast<std::size_t>(end)]);
        if (rot == 0.0) continue;
        double limit = 0.0;
        switch (member.kind) {
          case MemberKind::column: {
            double demand_ratio =
                P_grav * 1e3 / (sm.caps.A_g * mat.fc_prime_mpa);
            double d_eff = effective_depth_mm(
                sm.column_rec.side_mm, sm.column_rec.bars.diameter_mm,
                sized.rules);
            double shear = member_shear_ratio_psi(
                capacity_shear_kn(trace, m, sm.length_m),
                sm.column_rec.side_mm, d_eff, mat.fc_prime_mpa);
            limit = rotation_limit(tables, MemberKind::column, demand_ratio,
                                   true, shear, demand.level);
            raise(20, over(rot, limit));
            break;
          }
          case MemberKind::wall: {
            double l_w_mm = sized.model->bays[static_cast<std::size_t>(
                                member.bay - 1)] *
                            1000.0;
            WallTerms terms = derive_wall_terms(
                sm.wall_rec, mat, l_w_mm, P_grav,
                capacity_shear_kn(trace, m, sm.length_m));
            limit = rotation_limit(tables, MemberKind::wall,
                                   terms.axial_flexural, terms.has_boundary,
                                   shear_ratio_to_psi(terms.shear),
                                   demand.level);
            raise(20, over(rot, limit));
            break;
          }
          case MemberKind::beam: {
            const BeamSectionRecord& rec = sm.beam_rec;
            double d_eff = effective_depth_mm(
                rec.depth_mm,
                std::max(rec.top_bars.diameter_mm, rec.bot_bars.diameter_mm),
                sized.rules);
            double bd = rec.width_mm * d_eff;
            // Basic-coordinate sign: positive rotation hogs end i and sags
            // end j, fixing which face is in tension.
            double signed_rot =
                state.hinge_rot[2 * m + static_cast<std::size_t>(end)];
            bool hogging = end == 0 ? signed_rot > 0.0 : signed_rot < 0.0;
            double rho_t = (hogging ? rec.top_bars : rec.bot_bars).area_mm2() / bd;
            double rho_c = (hogging ? rec.bot_bars : rec.top_bars).area_mm2() / bd;
            double demand_ratio = (rho_t - rho_c) / sm.caps.rho_bal;
            double shear = member_shear_ratio_psi(
                capacity_shear_kn(trace, m, sm.length_m), rec.width_mm, d_eff,
                mat.fc_prime_mpa);
            limit = rotation_limit(tables, MemberKind::beam, demand_ratio,
                                   true, shear, demand.level);
            raise(21, over(rot, limit));
            break;
          }
        }
      }
    }
  }
  return c;
}

double aggregate(const std::vector<double>& c) {
  double sum = 0.0;
  for (double v : c) {
    if (v < 0.0)
      throw std::runtime_error("aggregate: negative violation term");
    sum += v;
  }
  return sum;
}

double penalize(double F, double C, const PenaltyParams& params) {
  return F * std::pow(1.0 + params.K * C, params.eps);
}

PenaltyReport make_report(double weight_kg, const std::vector<double>& c,
                          const PenaltyParams& params) {
  PenaltyReport report;
  report.c = c;
  report.c.resize(kNumConstraints, 0.0);
  report.F = weight_kg;
  report.C = aggregate(report.c);
  report.phi = penalize(report.F, report.C, params);
  return report;
}

}  // namespace framepbo
