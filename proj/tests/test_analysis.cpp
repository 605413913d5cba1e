#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "framepbo/analysis.hpp"
#include "framepbo/frame.hpp"
#include "framepbo/sections.hpp"
#include "support/paths.hpp"

using namespace framepbo;

namespace {

SectionCatalogs& catalogs() {
  static SectionCatalogs cats = load_catalogs(data_dir());
  return cats;
}

// One vertical column in a 1x1 grid; the floating top-right node is slaved to
// the column top through a rigid in-plane link so lateral load lands there.
struct CantileverRig {
  FrameModel model;
  SizedFrame sized;
  double EI = 2.0e4;  // kN.m^2
  double EA = 1.0e9;  // kN
  double h = 3.0;

  CantileverRig() {
    model = build_case(CaseId::unit, GeometryConfig{});
    model.members = {{MemberKind::column, model.node_at(0, 0),
                      model.node_at(1, 0), 0, 0, 0}};
    model.rigid_links = {{model.node_at(1, 0), model.node_at(1, 1)}};
    sized.model = &model;
    SizedMember sm;
    sm.member = &model.members[0];
    sm.length_m = h;
    sm.EA_kn = EA;
    sm.EI_kn_m2 = EI;
    sm.A_g_m2 = 0.09;
    sm.A_st_m2 = 1.2e-3;
    sized.members = {sm};
  }
};

SizedFrame sized_unit(int beam_id, int col_id, FrameModel& storage,
                      const GeometryConfig& geom = GeometryConfig{}) {
  storage = build_case(CaseId::unit, geom);
  DesignVector d;
  d.beam_group_ids = {beam_id};
  d.column_group_ids = {col_id};
  return apply_design(storage, d, catalogs(), Materials{}, SectionRules{});
}

LoadCombination pure_lateral() {
  return LoadCombination{ComboTag::Gpbd, 0.0, 0.0, 1.0, 1};
}

}  // namespace

TEST_CASE("zero loads give zero response") {
  FrameModel storage;
  SizedFrame sized = sized_unit(1, 1, storage);
  LoadCombination zero{ComboTag::Gpbd, 0.0, 0.0, 0.0, 1};
  LinearResult res = linear_static(sized, zero);
  REQUIRE(res.ok);
  for (double u : res.ux) CHECK(u == 0.0);
  for (double u : res.uy) CHECK(u == 0.0);
  for (const auto& f : res.forces) {
    CHECK(f.P == 0.0);
    CHECK(f.M_max == 0.0);
    CHECK(f.V == 0.0);
  }
}

TEST_CASE("cantilever tip displacement matches FL^3/3EI to 1e-9") {
  CantileverRig rig;
  double V = 10.0;
  LinearResult res = linear_static(rig.sized, pure_lateral(), V);
  REQUIRE(res.ok);
  double expected = V * rig.h * rig.h * rig.h / (3.0 * rig.EI);
  double tip = res.ux[static_cast<size_t>(rig.model.node_at(1, 0))];
  CHECK(std::abs(tip - expected) <= 1e-9 * expected);
  // The slaved node rides along exactly.
  CHECK(res.ux[static_cast<size_t>(rig.model.node_at(1, 1))] ==
        doctest::Approx(tip).epsilon(1e-12));
  // Base member forces: shear V, base moment V*h.
  CHECK(res.forces[0].V == doctest::Approx(V).epsilon(1e-9));
  CHECK(res.forces[0].M_max == doctest::Approx(V * rig.h).epsilon(1e-9));
}

TEST_CASE("portal with rigid beam reaches the 2x12EI/h^3 stiffness") {
  FrameModel model = build_case(CaseId::unit, GeometryConfig{});
  model.members = {{MemberKind::column, model.node_at(0, 0),
                    model.node_at(1, 0), 0, 0, 0},
                   {MemberKind::column, model.node_at(0, 1),
                    model.node_at(1, 1), 0, 0, 0}};
  model.rigid_links = {{model.node_at(1, 0), model.node_at(1, 1)}};
  double EI = 1.0e4, EA = 1.0e12, h = 3.0;
  SizedFrame sized;
  sized.model = &model;
  for (auto& m : model.members) {
    SizedMember sm;
    sm.member = &m;
    sm.length_m = h;
    sm.EA_kn = EA;
    sm.EI_kn_m2 = EI;
    sized.members.push_back(sm);
  }
  LinearResult res = linear_static(sized, pure_lateral(), 1.0);
  REQUIRE(res.ok);
  double K = 1.0 / res.roof_disp;
  double expected = 2.0 * 12.0 * EI / (h * h * h);
  CHECK(std::abs(K - expected) <= 1e-6 * expected);
}

TEST_CASE("fixed-end moments and span extrema under gravity") {
  // Tiny frame with very stiff columns approximates a fixed-fixed beam.
  FrameModel model = build_case(CaseId::unit, GeometryConfig{});
  SizedFrame sized;
  sized.model = &model;
  for (auto& m : model.members) {
    SizedMember sm;
    sm.member = &m;
    sm.length_m = m.kind == MemberKind::beam ? 5.0 : 3.0;
    sm.EA_kn = 1e12;
    sm.EI_kn_m2 = m.kind == MemberKind::beam ? 1.0e4 : 1.0e12;
    sized.members.push_back(sm);
  }
  LoadCombination combo = make_combination(ComboTag::ACI1);
  LinearResult res = linear_static(sized, combo);
  REQUIRE(res.ok);
  const StoryInfo& st = model.stories[0];
  double w = factored_load(combo, st.dead_kn_m2 * st.tributary_m,
                           st.live_kn_m2 * st.tributary_m, 0.0);
  double L = 5.0;
  int beam_idx = -1;
  for (size_t i = 0; i < model.members.size(); ++i)
    if (model.members[i].kind == MemberKind::beam)
      beam_idx = static_cast<int>(i);
  REQUIRE(beam_idx >= 0);
  const MemberEndForces& f = res.forces[static_cast<size_t>(beam_idx)];
  CHECK(f.M_span_neg == doctest::Approx(w * L * L / 12.0).epsilon(1e-6));
  CHECK(f.M_span_pos == doctest::Approx(w * L * L / 24.0).epsilon(1e-6));
  CHECK(f.V == doctest::Approx(w * L / 2.0).epsilon(1e-6));
  // Moment-diagram identity: midspan sagging plus mean end hogging = wL^2/8.
  CHECK(f.M_span_pos + (std::abs(f.M_i) + std::abs(f.M_j)) / 2.0 ==
        doctest::Approx(w * L * L / 8.0).epsilon(1e-9));
  // Columns carry the tributary load down: sum of axials = w*L.
  double sum_axial = 0.0;
  for (size_t i = 0; i < model.members.size(); ++i)
    if (model.members[i].kind == MemberKind::column)
      sum_axial += res.forces[i].P;
  CHECK(sum_axial == doctest::Approx(w * L).epsilon(1e-9));
}

TEST_CASE("reciprocity: symmetric flexibility between two load patterns") {
  // Bare two-story one-bay frame so each level's load splits evenly
  // between its two nodes.
  FrameModel model;
  model.case_id = CaseId::unit;
  model.n_stories = 2;
  model.n_bays = 1;
  GeometryConfig geom;
  double dead = geom.dead_kg_m2 * geom.gravity_g / 1000.0;
  double live = geom.live_kg_m2 * geom.gravity_g / 1000.0;
  model.stories.assign(2, StoryInfo{3.0, dead, live, 5.0});
  model.bays = {5.0};
  for (int lvl = 0; lvl <= 2; ++lvl)
    for (int c = 0; c <= 1; ++c)
      model.nodes.push_back({5.0 * c, 3.0 * lvl});
  for (int s = 0; s < 2; ++s)
    for (int c = 0; c <= 1; ++c)
      model.members.push_back({MemberKind::column, model.node_at(s, c),
                               model.node_at(s + 1, c), s, s, 0});
  for (int lvl = 1; lvl <= 2; ++lvl)
    model.members.push_back({MemberKind::beam, model.node_at(lvl, 0),
                             model.node_at(lvl, 1), lvl - 1, lvl - 1, 0});
  SizedFrame sized;
  sized.model = &model;
  for (auto& m : model.members) {
    SizedMember sm;
    sm.member = &m;
    sm.length_m = m.kind == MemberKind::beam ? 5.0 : 3.0;
    sm.EA_kn = 2.0e6;
    sm.EI_kn_m2 = m.kind == MemberKind::beam ? 4.0e4 : 6.0e4;
    sized.members.push_back(sm);
  }

  LateralPattern only_first{{1.0, 0.0}};
  LateralPattern only_roof{{0.0, 1.0}};
  LinearResult a = linear_static(sized, pure_lateral(), 1.0, &only_first);
  LinearResult b = linear_static(sized, pure_lateral(), 1.0, &only_roof);
  REQUIRE(a.ok);
  REQUIRE(b.ok);
  // Betti: F_a . u_b == F_b . u_a with each unit force split evenly over
  // the loaded level's two nodes.
  auto ux = [&](const LinearResult& r, int lvl, int col) {
    return r.ux[static_cast<size_t>(model.node_at(lvl, col))];
  };
  double fa_ub = 0.5 * (ux(b, 1, 0) + ux(b, 1, 1));
  double fb_ua = 0.5 * (ux(a, 2, 0) + ux(a, 2, 1));
  CHECK(fa_ub == doctest::Approx(fb_ua).epsilon(1e-9));
}

TEST_CASE("lateral pattern is the normalized m*h profile") {
  FrameModel model;
  model.case_id = CaseId::unit;
  model.n_stories = 3;
  model.n_bays = 1;
  GeometryConfig geom;
  double dead = geom.dead_kg_m2 * geom.gravity_g / 1000.0;
  double live = geom.live_kg_m2 * geom.gravity_g / 1000.0;
  model.stories.assign(3, StoryInfo{3.0, dead, live, 5.0});
  model.bays = {5.0};
  for (int lvl = 0; lvl <= 3; ++lvl)
    for (int c = 0; c <= 1; ++c)
      model.nodes.push_back({5.0 * c, 3.0 * lvl});
  SizedFrame sized;
  sized.model = &model;

  LateralPattern p = lateral_pattern(sized);
  REQUIRE(p.story_forces.size() == 3);
  CHECK(p.story_forces[0] == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  CHECK(p.story_forces[1] == doctest::Approx(2.0 / 6.0).epsilon(1e-12));
  CHECK(p.story_forces[2] == doctest::Approx(3.0 / 6.0).epsilon(1e-12));

  // Doubling every mass leaves the normalized profile unchanged.
  for (auto& st : model.stories) {
    st.dead_kn_m2 *= 2.0;
    st.live_kn_m2 *= 2.0;
  }
  LateralPattern p2 = lateral_pattern(sized);
  for (int k = 0; k < 3; ++k)
    CHECK(p2.story_forces[static_cast<size_t>(k)] ==
          doctest::Approx(p.story_forces[static_cast<size_t>(k)])
              .epsilon(1e-12));

  FrameModel unit_storage;
  SizedFrame unit = sized_unit(1, 1, unit_storage);
  LateralPattern single = lateral_pattern(unit);
  REQUIRE(single.story_forces.size() == 1);
  CHECK(single.story_forces[0] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("pushover elastic slope equals the linear lateral stiffness") {
  FrameModel storage;
  SizedFrame sized = sized_unit(10, 30, storage);
  LateralPattern pat = lateral_pattern(sized);

  LinearResult lin = linear_static(sized, pure_lateral(), 1.0);
  REQUIRE(lin.ok);
  double K_lin = 1.0 / lin.roof_disp;

  PushoverControl ctl;
  ctl.target_roof_disp_m = 0.002;  // well inside the elastic range
  ctl.steps = 10;
  ctl.pdelta = false;
  PushoverTrace trace = pushover(sized, pat, ctl);
  REQUIRE(trace.completed);
  const PushStep& s1 = trace.steps[1];
  const PushStep& s2 = trace.steps[5];
  double slope = (s2.base_shear - s1.base_shear) /
                 (s2.roof_disp - s1.roof_disp);
  CHECK(std::abs(slope - K_lin) <= 1e-6 * K_lin);
  CHECK(trace.K_i == doctest::Approx(K_lin).epsilon(1e-9));
}

TEST_CASE("elastic pushover equals linear solution scaled by load factor") {
  FrameModel storage;
  SizedFrame sized = sized_unit(10, 30, storage);
  LateralPattern pat = lateral_pattern(sized);
  LinearResult unit = linear_static(sized, pure_lateral(), 1.0);
  REQUIRE(unit.ok);

  PushoverControl ctl;
  ctl.target_roof_disp_m = 0.002;
  ctl.steps = 8;
  ctl.pdelta = false;
  ctl.gravity = LoadCombination{ComboTag::Gpbd, 0.0, 0.0, 0.0, 1};
  PushoverTrace trace = pushover(sized, pat, ctl);
  REQUIRE(trace.completed);
  double u0 = trace.steps[0].roof_disp;
  for (size_t k = 1; k < trace.steps.size(); ++k) {
    const PushStep& s = trace.steps[k];
    double expected = s.lambda * unit.roof_disp;
    CHECK(std::abs((s.roof_disp - u0) - expected) <=
          1e-9 * std::max(1e-6, std::abs(expected)));
    for (double rot : s.hinge_rot) CHECK(rot == 0.0);  // below yield
  }
}

TEST_CASE("cantilever pushover is bilinear with the kink at Mn/L") {
  // Catalog column 1 as a 3 m cantilever, zero gravity axial.
  FrameModel model = build_case(CaseId::unit, GeometryConfig{});
  model.members = {{MemberKind::column, model.node_at(0, 0),
                    model.node_at(1, 0), 0, 0, 0}};
  model.rigid_links = {{model.node_at(1, 0), model.node_at(1, 1)}};
  DesignVector d;
  d.beam_group_ids = {1};
  d.column_group_ids = {1};
  SizedFrame sized =
      apply_design(model, d, catalogs(), Materials{}, SectionRules{});

  double h = 3.0;
  double EI = sized.members[0].EI_kn_m2;
  double M_n = sized.column_diagrams[0].moment_at(0.0);
  double V_y = M_n / h;
  double u_y = V_y / (3.0 * EI / (h * h * h));

  LateralPattern pat{{1.0}};
  PushoverControl ctl;
  ctl.target_roof_disp_m = 3.0 * u_y;
  ctl.steps = 300;
  ctl.pdelta = false;
  PushoverTrace trace = pushover(sized, pat, ctl);
  REQUIRE(trace.completed);

  // Peak shear within 1% of the closed-form plastic strength.
  double V_peak = 0.0;
  for (const auto& s : trace.steps) V_peak = std::max(V_peak, s.base_shear);
  CHECK(std::abs(V_peak - V_y) <= 0.01 * V_y);

  // Elastic branch: shear tracks K*u within 1%, rotations zero.
  StateAt half = state_at(trace, 0.5 * u_y);
  REQUIRE(half.reached);
  CHECK(half.base_shear ==
        doctest::Approx(0.5 * u_y * 3.0 * EI / (h * h * h)).epsilon(0.01));
  for (double rot : half.hinge_rot) CHECK(rot == doctest::Approx(0.0));

  // Deep plastic branch: base hinge rotation approx (u - u_y)/h.
  StateAt deep = state_at(trace, 2.5 * u_y);
  REQUIRE(deep.reached);
  CHECK(deep.hinge_rot[0] ==
        doctest::Approx(1.5 * u_y / h).epsilon(0.05));

  // The bilinear fit recovers the same strength and stiffness.
  BilinearFit fit = fit_bilinear(trace);
  CHECK(fit.V_y == doctest::Approx(V_y).epsilon(0.03));
  CHECK(fit.K_e == doctest::Approx(3.0 * EI / (h * h * h)).epsilon(0.03));
  CHECK(fit.K_i == doctest::Approx(3.0 * EI / (h * h * h)).epsilon(1e-6));

  // External work increments stay nonnegative on the ascending branch.
  for (size_t k = 1; k < trace.steps.size(); ++k)
    CHECK(trace.steps[k].base_shear *
              (trace.steps[k].roof_disp - trace.steps[k - 1].roof_disp) >=
          -1e-12);
}

TEST_CASE("zero pattern leaves the trace at the gravity state") {
  FrameModel storage;
  SizedFrame sized = sized_unit(5, 10, storage);
  LateralPattern zero{{0.0}};
  PushoverControl ctl;
  ctl.steps = 12;
  PushoverTrace trace = pushover(sized, zero, ctl);
  REQUIRE(trace.completed);
  CHECK(trace.steps.size() == 13);  // gravity + 12 recorded steps
  for (const auto& s : trace.steps) {
    CHECK(s.base_shear == 0.0);
    CHECK(s.roof_disp == doctest::Approx(trace.steps[0].roof_disp));
  }
}

TEST_CASE("P-Delta softens the elastic lateral stiffness") {
  FrameModel storage;
  SizedFrame sized = sized_unit(5, 5, storage);
  LateralPattern pat = lateral_pattern(sized);
  PushoverControl ctl;
  ctl.target_roof_disp_m = 0.002;
  ctl.steps = 4;
  ctl.pdelta = false;
  PushoverTrace without = pushover(sized, pat, ctl);
  ctl.pdelta = true;
  PushoverTrace with = pushover(sized, pat, ctl);
  REQUIRE(without.completed);
  REQUIRE(with.completed);
  CHECK(with.K_i < without.K_i);
  CHECK(with.K_i > 0.9 * without.K_i);  // softening is small, not singular
}

TEST_CASE("state_at interpolates and flags unreached displacements") {
  PushoverTrace trace;
  trace.n_stories = 2;
  PushStep s0;
  s0.lambda = 0.0;
  s0.base_shear = 0.0;
  s0.roof_disp = 0.0;
  s0.story_disp = {0.0, 0.0};
  s0.drift = {0.0, 0.0};
  s0.hinge_rot = {0.0, 0.0};
  PushStep s1 = s0;
  s1.lambda = 10.0;
  s1.base_shear = 10.0;
  s1.roof_disp = 0.025;
  s1.story_disp = {0.01, 0.025};
  s1.drift = {0.01 / 3.0, 0.015 / 3.0};
  s1.hinge_rot = {0.002, 0.0};
  trace.steps = {s0, s1};

  StateAt exact = state_at(trace, 0.025);
  REQUIRE(exact.reached);
  CHECK(exact.drift[0] == doctest::Approx(0.0033333333).epsilon(1e-6));
  CHECK(exact.drift[1] == doctest::Approx(0.005).epsilon(1e-9));
  CHECK(exact.hinge_rot[0] == doctest::Approx(0.002).epsilon(1e-12));

  StateAt mid = state_at(trace, 0.0125);
  REQUIRE(mid.reached);
  CHECK(mid.base_shear == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(mid.hinge_rot[0] == doctest::Approx(0.001).epsilon(1e-12));

  StateAt beyond = state_at(trace, 0.03);
  CHECK_FALSE(beyond.reached);
}

TEST_CASE("Rayleigh period matches the exact single-story value") {
  FrameModel storage;
  SizedFrame sized = sized_unit(5, 10, storage);
  LateralPattern pat = lateral_pattern(sized);
  LinearResult unit = linear_static(sized, pure_lateral(), 1.0);
  REQUIRE(unit.ok);
  double K = 1.0 / unit.roof_disp;             // kN/m
  double m = storage.story_mass_t(0);          // t == kN s^2/m
  double T_exact = 2.0 * M_PI * std::sqrt(m / K);
  CHECK(rayleigh_period(sized, pat) ==
        doctest::Approx(T_exact).epsilon(1e-12));
}

TEST_CASE("effective period follows T_i sqrt(K_i/K_e)") {
  CHECK(effective_period(0.7, 1234.0, 1234.0) == doctest::Approx(0.7));
  CHECK(effective_period(0.5, 2.0, 1.0) ==
        doctest::Approx(0.70710678).epsilon(1e-8));
  CHECK(effective_period(0.5, 1.0, 2.0) < 0.5);
  CHECK_THROWS_AS(effective_period(0.0, 1.0, 1.0), std::runtime_error);
  CHECK_THROWS_AS(effective_period(0.5, -1.0, 1.0), std::runtime_error);
}

TEST_CASE("target displacement formula and C0 table") {
  TargetDisplacementInputs in;  // all ones
  CHECK(target_displacement(in) ==
        doctest::Approx(9.81 / (4.0 * M_PI * M_PI)).epsilon(1e-6));
  CHECK(target_displacement(in) == doctest::Approx(0.24849).epsilon(1e-4));

  in.C2 = 0.0;
  CHECK(target_displacement(in) == 0.0);
  in.C2 = 1.0;
  in.T_e = 2.0;
  CHECK(target_displacement(in) ==
        doctest::Approx(4.0 * 9.81 / (4.0 * M_PI * M_PI)).epsilon(1e-9));
  in.T_e = -1.0;
  CHECK_THROWS_AS(target_displacement(in), std::runtime_error);

  CHECK(c0_factor(1) == doctest::Approx(1.0));
  CHECK(c0_factor(2) == doctest::Approx(1.2));
  CHECK(c0_factor(3) == doctest::Approx(1.3));
  CHECK(c0_factor(4) == doctest::Approx(1.35));
  CHECK(c0_factor(5) == doctest::Approx(1.4));
  CHECK(c0_factor(8) == doctest::Approx(1.46));
  CHECK(c0_factor(10) == doctest::Approx(1.5));
  CHECK(c0_factor(12) == doctest::Approx(1.5));
}

TEST_CASE("trace serializes to CSV with the drift columns") {
  FrameModel storage;
  SizedFrame sized = sized_unit(5, 10, storage);
  PushoverControl ctl;
  ctl.target_roof_disp_m = 0.002;
  ctl.steps = 3;
  PushoverTrace trace = pushover(sized, lateral_pattern(sized), ctl);
  REQUIRE(trace.completed);
  std::string path = "/tmp/framepbo_trace.csv";
  write_trace_csv(path, trace);
  std::ifstream f(path);
  std::string header;
  std::getline(f, header);
  CHECK(header == "step,load_factor,base_shear_kN,roof_disp_m,drift_1");
  int rows = 0;
  std::string line;
  while (std::getline(f, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 4);  // gravity + 3 steps
  std::remove(path.c_str());
}

TEST_CASE("story4 case analyzes end to end with walls engaged") {
  FrameModel model = build_case(CaseId::story4, GeometryConfig{});
  DesignVector d;
  d.beam_group_ids = {20, 20, 15, 15};
  d.column_group_ids = {50, 50, 40, 40};
  d.wall_group_ids = {20, 20, 15, 15};
  SizedFrame sized =
      apply_design(model, d, catalogs(), Materials{}, SectionRules{});

  LinearResult grav = linear_static(sized, make_combination(ComboTag::ACI1));
  REQUIRE(grav.ok);
  // Walls pick up their bay's tributary load: total base axial equals the
  // applied floor load.
  double total = 0.0;
  for (size_t i = 0; i < model.members.size(); ++i) {
    const Member& m = model.members[i];
    if (m.story == 0 &&
        (m.kind == MemberKind::column || m.kind == MemberKind::wall))
      total += grav.forces[i].P;
  }
  const StoryInfo& st = model.stories[0];
  double w = factored_load(make_combination(ComboTag::ACI1),
                           st.dead_kn_m2 * st.tributary_m,
                           st.live_kn_m2 * st.tributary_m, 0.0);
  CHECK(total == doctest::Approx(w * 20.0 * 4.0).epsilon(1e-6));

  LinearResult seismic =
      linear_static(sized, make_combination(ComboTag::ACI2, +1), 500.0);
  REQUIRE(seismic.ok);
  CHECK(seismic.roof_disp > 0.0);
  CHECK(seismic.story_drift.size() == 4);

  PushoverControl ctl;
  ctl.target_roof_disp_m = 0.05;
  ctl.steps = 60;
  PushoverTrace trace = pushover(sized, lateral_pattern(sized), ctl);
  CHECK(trace.steps.size() >= 2);
  CHECK(trace.K_i > 0.0);
  // Walls make the frame far stiffer than the bare-frame unit case.
  CHECK(trace.K_i > 1e4);
}
