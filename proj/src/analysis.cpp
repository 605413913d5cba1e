#include "framepbo/analysis.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "framepbo/csvio.hpp"

namespace framepbo {

namespace {

// ---------------------------------------------------------------------------
// Assembly model: the frame grid plus internal wall-centerline nodes, with
// slave grid DOFs condensed onto their masters through rigid in-plane links.
// ---------------------------------------------------------------------------

struct DofTerm {
  int index = -1;      // reduced DOF
  double coeff = 0.0;
};

// Expansion of one full DOF into reduced DOFs (empty = fixed).
using DofExpansion = std::vector<DofTerm>;

struct Element {
  int na = 0, nb = 0;       // expanded node ids
  double L = 0.0;
  double cx = 0.0, cy = 0.0;  // direction cosines from a to b
  double EA = 0.0;            // kN
  double EI = 0.0;            // kN.m^2
  int member = -1;            // index into SizedFrame members
  MemberKind kind = MemberKind::beam;
};

struct AsmModel {
  const SizedFrame* sized = nullptr;
  int n_grid = 0;
  std::vector<double> x, y;              // expanded node positions
  std::vector<std::array<DofExpansion, 3>> dof;  // per expanded node: u, v, th
  int n_red = 0;
  std::vector<Element> elems;            // parallel to model members
  std::vector<int> wall_center_base;     // expanded id of level-0 center nodes
  // wall center node lookup: per wall bay position, per level
  std::vector<std::vector<int>> wall_centers;
};

int wall_bay_position(const FrameModel& model, int bay) {
  for (size_t i = 0; i < model.wall_bays.size(); ++i)
    if (model.wall_bays[i] == bay) return static_cast<int>(i);
  throw std::runtime_error("internal: bay has no wall");
}

AsmModel build_asm(const SizedFrame& sized) {
  const FrameModel& model = *sized.model;
  AsmModel am;
  am.sized = &sized;
  am.n_grid = static_cast<int>(model.nodes.size());
  for (const auto& n : model.nodes) {
    am.x.push_back(n.x);
    am.y.push_back(n.y);
  }

  // Wall centerline nodes, one column of them per wall bay.
  am.wall_centers.resize(model.wall_bays.size());
  for (size_t wb = 0; wb < model.wall_bays.size(); ++wb) {
    int bay = model.wall_bays[wb];
    double xc = 0.0;
    for (int b = 0; b < bay - 1; ++b) xc += model.bays[static_cast<size_t>(b)];
    xc += model.bays[static_cast<size_t>(bay - 1)] / 2.0;
    for (int lvl = 0; lvl <= model.n_stories; ++lvl) {
      am.wall_centers[wb].push_back(static_cast<int>(am.x.size()));
      am.x.push_back(xc);
      am.y.push_back(model.story_elevation(lvl));
    }
  }

  int n_nodes = static_cast<int>(am.x.size());
  std::vector<int> master_of(static_cast<size_t>(n_nodes), -1);
  std::vector<char> fixed(static_cast<size_t>(n_nodes), 0);

  for (int n = 0; n < n_nodes; ++n)
    if (am.y[static_cast<size_t>(n)] == 0.0) fixed[static_cast<size_t>(n)] = 1;

  auto enslave = [&](int master, int slave) {
    if (fixed[static_cast<size_t>(slave)]) return;  // base nodes stay fixed
    if (master_of[static_cast<size_t>(slave)] >= 0)
      throw std::runtime_error("frame: node is slaved to two masters");
    if (fixed[static_cast<size_t>(master)] ||
        master_of[static_cast<size_t>(master)] >= 0)
      throw std::runtime_error("frame: rigid-link master must be a free node");
    master_of[static_cast<size_t>(slave)] = master;
  };

  // Wall floor links: both flanking grid nodes ride on the centerline node.
  for (size_t wb = 0; wb < model.wall_bays.size(); ++wb) {
    int bay = model.wall_bays[wb];
    for (int lvl = 1; lvl <= model.n_stories; ++lvl) {
      int center = am.wall_centers[wb][static_cast<size_t>(lvl)];
      enslave(center, model.node_at(lvl, bay - 1));
      enslave(center, model.node_at(lvl, bay));
    }
  }
  for (const auto& [master, slave] : model.rigid_links) enslave(master, slave);

  // Number the reduced DOFs: masters and plain free nodes.
  am.dof.resize(static_cast<size_t>(n_nodes));
  int next = 0;
  std::vector<std::array<int, 3>> own(static_cast<size_t>(n_nodes),
                                      {-1, -1, -1});
  for (int n = 0; n < n_nodes; ++n) {
    if (fixed[static_cast<size_t>(n)] || master_of[static_cast<size_t>(n)] >= 0)
      continue;
    for (int c = 0; c < 3; ++c) own[static_cast<size_t>(n)][c] = next++;
  }
  am.n_red = next;
  for (int n = 0; n < n_nodes; ++n) {
    if (fixed[static_cast<size_t>(n)]) continue;  // empty expansions
    int m = master_of[static_cast<size_t>(n)];
    if (m < 0) {
      for (int c = 0; c < 3; ++c)
        am.dof[static_cast<size_t>(n)][c] = {
            {own[static_cast<size_t>(n)][c], 1.0}};
    } else {
      double dx = am.x[static_cast<size_t>(n)] - am.x[static_cast<size_t>(m)];
      double dy = am.y[static_cast<size_t>(n)] - am.y[static_cast<size_t>(m)];
      const auto& mo = own[static_cast<size_t>(m)];
      // Rigid body: u_s = u_m - dy*th, v_s = v_m + dx*th, th_s = th_m.
      am.dof[static_cast<size_t>(n)][0] = {{mo[0], 1.0}, {mo[2], -dy}};
      am.dof[static_cast<size_t>(n)][1] = {{mo[1], 1.0}, {mo[2], dx}};
      am.dof[static_cast<size_t>(n)][2] = {{mo[2], 1.0}};
      for (auto& comp : am.dof[static_cast<size_t>(n)])
        comp.erase(std::remove_if(comp.begin(), comp.end(),
                                  [](const DofTerm& t) {
                                    return t.coeff == 0.0;
                                  }),
                   comp.end());
    }
  }

  // Elements, one per member, in member order.
  for (size_t mi = 0; mi < model.members.size(); ++mi) {
    const Member& m = model.members[mi];
    const SizedMember& sm = sized.members[mi];
    Element e;
    e.member = static_cast<int>(mi);
    e.kind = m.kind;
    if (m.kind == MemberKind::wall) {
      int wb = wall_bay_position(model, m.bay);
      e.na = am.wall_centers[static_cast<size_t>(wb)]
                            [static_cast<size_t>(m.story)];
      e.nb = am.wall_centers[static_cast<size_t>(wb)]
                            [static_cast<size_t>(m.story + 1)];
    } else {
      e.na = m.ni;
      e.nb = m.nj;
    }
    double dx = am.x[static_cast<size_t>(e.nb)] - am.x[static_cast<size_t>(e.na)];
    double dy = am.y[static_cast<size_t>(e.nb)] - am.y[static_cast<size_t>(e.na)];
    e.L = std::hypot(dx, dy);
    if (e.L <= 0.0)
      throw std::runtime_error("frame: zero-length member in analysis model");
    e.cx = dx / e.L;
    e.cy = dy / e.L;
    e.EA = sm.EA_kn;
    e.EI = sm.EI_kn_m2;
    am.elems.push_back(e);
  }
  return am;
}

// Basic kinematics: global element displacements -> (axial, r_i, r_j).
// B is 3x6 over the local end DOFs; G rotates global to local.
struct BasicKinematics {
  Eigen::Matrix<double, 3, 6> B;      // local -> basic
  Eigen::Matrix<double, 6, 6> G;      // global -> local rotation
  Eigen::Matrix<double, 3, 6> BG;     // global -> basic
};

BasicKinematics basic_kinematics(const Element& e) {
  BasicKinematics k;
  k.G.setZero();
  double c = e.cx, s = e.cy;
  for (int blk = 0; blk < 2; ++blk) {
    int o = 3 * blk;
    k.G(o + 0, o + 0) = c;
    k.G(o + 0, o + 1) = s;
    k.G(o + 1, o + 0) = -s;
    k.G(o + 1, o + 1) = c;
    k.G(o + 2, o + 2) = 1.0;
  }
  k.B.setZero();
  k.B(0, 0) = -1.0;
  k.B(0, 3) = 1.0;
  k.B(1, 1) = 1.0 / e.L;
  k.B(1, 2) = 1.0;
  k.B(1, 4) = -1.0 / e.L;
  k.B(2, 1) = 1.0 / e.L;
  k.B(2, 5) = 1.0;
  k.B(2, 4) = -1.0 / e.L;
  k.BG = k.B * k.G;
  return k;
}

Eigen::Matrix2d flexural_stiffness(const Element& e) {
  Eigen::Matrix2d K;
  K << 4.0, 2.0, 2.0, 4.0;
  return K * (e.EI / e.L);
}

// Scatter helper: expands (node, comp) into reduced DOFs.
const DofExpansion& expansion(const AsmModel& am, int node, int comp) {
  return am.dof[static_cast<size_t>(node)][static_cast<size_t>(comp)];
}

void add_element_matrix(const AsmModel& am, const Element& e,
                        const Eigen::Matrix<double, 6, 6>& ke,
                        Eigen::MatrixXd& K) {
  int nodes[2] = {e.na, e.nb};
  for (int a = 0; a < 6; ++a) {
    const DofExpansion& ea = expansion(am, nodes[a / 3], a % 3);
    if (ea.empty()) continue;
    for (int b = 0; b < 6; ++b) {
      const DofExpansion& eb = expansion(am, nodes[b / 3], b % 3);
      if (eb.empty()) continue;
      for (const DofTerm& ta : ea)
        for (const DofTerm& tb : eb)
          K(ta.index, tb.index) += ta.coeff * tb.coeff * ke(a, b);
    }
  }
}

void add_element_vector(const AsmModel& am, const Element& e,
                        const Eigen::Matrix<double, 6, 1>& fe,
                        Eigen::VectorXd& F) {
  int nodes[2] = {e.na, e.nb};
  for (int a = 0; a < 6; ++a) {
    const DofExpansion& ea = expansion(am, nodes[a / 3], a % 3);
    for (const DofTerm& ta : ea) F(ta.index) += ta.coeff * fe(a);
  }
}

void add_nodal_force(const AsmModel& am, int node, int comp, double value,
                     Eigen::VectorXd& F) {
  for (const DofTerm& t : expansion(am, node, comp)) F(t.index) += t.coeff * value;
}

Eigen::Matrix<double, 6, 1> gather_element_disp(const AsmModel& am,
                                                const Element& e,
                                                const Eigen::VectorXd& U) {
  Eigen::Matrix<double, 6, 1> u;
  u.setZero();
  int nodes[2] = {e.na, e.nb};
  for (int a = 0; a < 6; ++a)
    for (const DofTerm& t : expansion(am, nodes[a / 3], a % 3))
      u(a) += t.coeff * U(t.index);
  return u;
}

double recover_dof(const AsmModel& am, int node, int comp,
                   const Eigen::VectorXd& U) {
  double v = 0.0;
  for (const DofTerm& t : expansion(am, node, comp)) v += t.coeff * U(t.index);
  return v;
}

// Gravity line load (kN/m, downward positive) on a member for a combination.
double member_gravity_load(const SizedFrame& sized, const Member& m,
                           const LoadCombination& combo) {
  if (m.kind != MemberKind::beam) return 0.0;
  const StoryInfo& st = sized.model->stories[static_cast<size_t>(m.story)];
  double wd = st.dead_kn_m2 * st.tributary_m;
  double wl = st.live_kn_m2 * st.tributary_m;
  return factored_load(combo, wd, wl, 0.0);
}

// Fixed-end local force vector (reactions at the ends, local axes) for a
// uniform transverse load w acting in -y_local on the full span.
Eigen::Matrix<double, 6, 1> fixed_end_forces(const Element& e, double w) {
  Eigen::Matrix<double, 6, 1> f;
  f.setZero();
  f(1) = w * e.L / 2.0;
  f(2) = w * e.L * e.L / 12.0;
  f(4) = w * e.L / 2.0;
  f(5) = -w * e.L * e.L / 12.0;
  return f;
}

struct ComboLoads {
  Eigen::VectorXd F;                  // reduced external load vector
  std::vector<double> beam_w;         // line load per member (kN/m down)
  std::vector<Eigen::Matrix<double, 6, 1>> f0;  // local fixed-end forces
};

ComboLoads build_gravity_loads(const AsmModel& am,
                               const LoadCombination& combo) {
  const SizedFrame& sized = *am.sized;
  const FrameModel& model = *sized.model;
  ComboLoads out;
  out.F = Eigen::VectorXd::Zero(am.n_red);
  out.beam_w.assign(am.elems.size(), 0.0);
  out.f0.assign(am.elems.size(), Eigen::Matrix<double, 6, 1>::Zero());

  for (size_t ei = 0; ei < am.elems.size(); ++ei) {
    const Element& e = am.elems[ei];
    const Member& m = model.members[static_cast<size_t>(e.member)];
    double w = member_gravity_load(sized, m, combo);
    if (w == 0.0) continue;
    out.beam_w[ei] = w;
    Eigen::Matrix<double, 6, 1> f0 = fixed_end_forces(e, w);
    out.f0[ei] = f0;
    // Equivalent nodal loads are minus the fixed-end reactions, rotated to
    // global axes (beams are horizontal, so local -y is global -y).
    BasicKinematics kin = basic_kinematics(e);
    Eigen::Matrix<double, 6, 1> feq = -kin.G.transpose() * f0;
    add_element_vector(am, e, feq, out.F);
  }

  // Wall-bay floor strips arrive as concentrated loads on the centerline.
  for (size_t wb = 0; wb < model.wall_bays.size(); ++wb) {
    int bay = model.wall_bays[wb];
    double width = model.bays[static_cast<size_t>(bay - 1)];
    for (int lvl = 1; lvl <= model.n_stories; ++lvl) {
      const StoryInfo& st = model.stories[static_cast<size_t>(lvl - 1)];
      double Pd = st.dead_kn_m2 * st.tributary_m * width;
      double Pl = st.live_kn_m2 * st.tributary_m * width;
      double P = factored_load(combo, Pd, Pl, 0.0);
      add_nodal_force(am, am.wall_centers[wb][static_cast<size_t>(lvl)], 1,
                      -P, out.F);
    }
  }
  return out;
}

// Unit-base-shear lateral load vector; each story force is split evenly
// across the grid nodes of its level (the DOF mapping reroutes slaved
// shares onto the wall masters).
Eigen::VectorXd build_lateral_loads(const AsmModel& am,
                                    const LateralPattern& pattern) {
  const FrameModel& model = *am.sized->model;
  if (static_cast<int>(pattern.story_forces.size()) != model.n_stories)
    throw std::runtime_error("lateral pattern length mismatch");
  Eigen::VectorXd F = Eigen::VectorXd::Zero(am.n_red);
  for (int s = 0; s < model.n_stories; ++s) {
    double share = pattern.story_forces[static_cast<size_t>(s)] /
                   (model.n_bays + 1);
    for (int col = 0; col <= model.n_bays; ++col)
      add_nodal_force(am, model.node_at(s + 1, col), 0, share, F);
  }
  return F;
}

// Linearized geometric stiffness from held axial forces (compression
// positive): a -P/L string term on the transverse end displacements.
Eigen::MatrixXd build_geometric_stiffness(const AsmModel& am,
                                          const std::vector<double>& axial) {
  Eigen::MatrixXd Kg = Eigen::MatrixXd::Zero(am.n_red, am.n_red);
  for (size_t ei = 0; ei < am.elems.size(); ++ei) {
    const Element& e = am.elems[ei];
    if (e.kind == MemberKind::beam) continue;
    double P = axial[ei];  // compression positive
    if (P == 0.0) continue;
    double k = -P / e.L;
    // Transverse direction is local y; rotate [1 -1; -1 1] into global.
    double tx = -e.cy, ty = e.cx;
    Eigen::Matrix<double, 6, 6> ke;
    ke.setZero();
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        double sgn = (a == b) ? 1.0 : -1.0;
        int oa = 3 * a, ob = 3 * b;
        ke(oa + 0, ob + 0) += sgn * k * tx * tx;
        ke(oa + 0, ob + 1) += sgn * k * tx * ty;
        ke(oa + 1, ob + 0) += sgn * k * ty * tx;
        ke(oa + 1, ob + 1) += sgn * k * ty * ty;
      }
    add_element_matrix(am, e, ke, Kg);
  }
  return Kg;
}

struct SolveOutcome {
  bool ok = false;
  std::string error;
  Eigen::VectorXd U;
};

SolveOutcome solve_spd(const Eigen::MatrixXd& K, const Eigen::VectorXd& F) {
  SolveOutcome out;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(K);
  if (ldlt.info() != Eigen::Success) {
    out.error = "stiffness factorization failed (mechanism)";
    return out;
  }
  double dmin = ldlt.vectorD().minCoeff();
  double dmax = ldlt.vectorD().maxCoeff();
  if (!(dmin > 0.0) || dmin < 1e-14 * dmax) {
    out.error = "singular or indefinite stiffness (mechanism)";
    return out;
  }
  out.U = ldlt.solve(F);
  out.ok = true;
  return out;
}

// Bending moment diagram extrema for a member with basic end moments
// (m_i, m_j) and uniform downward load w. Sagging positive.
void span_extrema(double m_i, double m_j, double w, double L,
                  double& max_pos, double& max_neg) {
  // M(x) = -m_i (1 - x/L) + m_j (x/L) + w x (L - x)/2
  auto M = [&](double xx) {
    return -m_i * (1.0 - xx / L) + m_j * (xx / L) + w * xx * (L - xx) / 2.0;
  };
  max_pos = std::max(0.0, std::max(M(0.0), M(L)));
  max_neg = std::max(0.0, -std::min(M(0.0), M(L)));
  if (w != 0.0) {
    // Stationary point of the parabola.
    double xs = L / 2.0 + (m_i + m_j) / (w * L);
    if (xs > 0.0 && xs < L) {
      double Ms = M(xs);
      max_pos = std::max(max_pos, Ms);
      max_neg = std::max(max_neg, -Ms);
    }
  }
}

MemberEndForces recover_member_forces(const AsmModel& am, size_t ei,
                                      const Eigen::VectorXd& U,
                                      const ComboLoads& loads) {
  const Element& e = am.elems[ei];
  BasicKinematics kin = basic_kinematics(e);
  Eigen::Matrix<double, 6, 1> ug = gather_element_disp(am, e, U);
  Eigen::Vector3d basic = kin.BG * ug;
  double N = e.EA / e.L * basic(0);  // tension positive
  Eigen::Vector2d m = flexural_stiffness(e) * basic.tail<2>();
  double w = loads.beam_w[ei];
  double m_i = m(0) + loads.f0[ei](2);
  double m_j = m(1) + loads.f0[ei](5);

  MemberEndForces f;
  f.P = -N;  // compression positive
  f.M_i = m_i;
  f.M_j = m_j;
  double V_end = (m_i + m_j) / e.L;
  f.V = std::max(std::abs(V_end + w * e.L / 2.0),
                 std::abs(V_end - w * e.L / 2.0));
  span_extrema(m_i, m_j, w, e.L, f.M_span_pos, f.M_span_neg);
  f.M_max = std::max(f.M_span_pos, f.M_span_neg);
  return f;
}

void fill_displacement_summary(const AsmModel& am, const Eigen::VectorXd& U,
                               LinearResult& res) {
  const FrameModel& model = *am.sized->model;
  res.ux.resize(static_cast<size_t>(am.n_grid));
  res.uy.resize(static_cast<size_t>(am.n_grid));
  res.rot.resize(static_cast<size_t>(am.n_grid));
  for (int n = 0; n < am.n_grid; ++n) {
    res.ux[static_cast<size_t>(n)] = recover_dof(am, n, 0, U);
    res.uy[static_cast<size_t>(n)] = recover_dof(am, n, 1, U);
    res.rot[static_cast<size_t>(n)] = recover_dof(am, n, 2, U);
  }
  res.story_disp.clear();
  res.story_drift.clear();
  double prev = 0.0;
  for (int s = 1; s <= model.n_stories; ++s) {
    double u = res.ux[static_cast<size_t>(model.node_at(s, 0))];
    res.story_disp.push_back(u);
    res.story_drift.push_back(
        (u - prev) / model.stories[static_cast<size_t>(s - 1)].height_m);
    prev = u;
  }
  res.roof_disp = res.story_disp.empty() ? 0.0 : res.story_disp.back();
}

}  // namespace

LateralPattern lateral_pattern(const SizedFrame& sized) {
  const FrameModel& model = *sized.model;
  LateralPattern p;
  double total = 0.0;
  for (int s = 0; s < model.n_stories; ++s) {
    double f = model.story_mass_t(s) * model.story_elevation(s + 1);
    p.story_forces.push_back(f);
    total += f;
  }
  if (total <= 0.0)
    throw std::runtime_error("lateral pattern: nonpositive mass-height sum");
  for (double& f : p.story_forces) f /= total;
  return p;
}

LinearResult linear_static(const SizedFrame& sized,
                           const LoadCombination& combo,
                           double base_shear_kn,
                           const LateralPattern* pattern) {
  AsmModel am = build_asm(sized);
  ComboLoads loads = build_gravity_loads(am, combo);
  if (combo.e_factor != 0.0 && base_shear_kn != 0.0) {
    LateralPattern pat = pattern ? *pattern : lateral_pattern(sized);
    Eigen::VectorXd Flat = build_lateral_loads(am, pat);
    loads.F += combo.e_factor * combo.e_sign * base_shear_kn * Flat;
  }

  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(am.n_red, am.n_red);
  for (const Element& e : am.elems) {
    BasicKinematics kin = basic_kinematics(e);
    Eigen::Matrix3d kb = Eigen::Matrix3d::Zero();
    kb(0, 0) = e.EA / e.L;
    kb.block<2, 2>(1, 1) = flexural_stiffness(e);
    Eigen::Matrix<double, 6, 6> ke =
        kin.BG.transpose() * kb * kin.BG;
    add_element_matrix(am, e, ke, K);
  }
  // Pin any untouched DOF (nodes no element references) so hand-built
  // partial models stay solvable.
  for (int i = 0; i < am.n_red; ++i)
    if (K(i, i) == 0.0) K(i, i) = 1.0;

  LinearResult res;
  SolveOutcome sol = solve_spd(K, loads.F);
  if (!sol.ok) {
    res.error = sol.error;
    return res;
  }
  res.ok = true;
  fill_displacement_summary(am, sol.U, res);
  res.forces.resize(am.elems.size());
  for (size_t ei = 0; ei < am.elems.size(); ++ei)
    res.forces[ei] = recover_member_forces(am, ei, sol.U, loads);
  return res;
}

// ---------------------------------------------------------------------------
// Pushover with lumped elastic-perfectly-plastic end hinges.
// ---------------------------------------------------------------------------

namespace {

struct HingePair {
  Eigen::Vector2d p = Eigen::Vector2d::Zero();      // plastic rotations
  Eigen::Vector2d kappa = Eigen::Vector2d::Zero();  // accumulated |dp|
};

struct ElementCaps {
  // Capacity for positive and negative basic moment at each end.
  Eigen::Vector2d pos{1e30, 1e30};
  Eigen::Vector2d neg{1e30, 1e30};
  double H = 0.0;  // hardening modulus, kN.m/rad
};

struct MappedElement {
  Eigen::Vector2d m_total = Eigen::Vector2d::Zero();
  Eigen::Vector2d dp = Eigen::Vector2d::Zero();
  Eigen::Matrix2d K_t = Eigen::Matrix2d::Zero();
};

// Return mapping for a two-ended elastic-perfectly-plastic (small isotropic
// hardening) hinge pair in basic flexural coordinates.
MappedElement return_map(const Eigen::Matrix2d& Kf, const Eigen::Vector2d& r,
                         const Eigen::Vector2d& m_fe, const HingePair& committed,
                         const ElementCaps& caps) {
  MappedElement out;
  Eigen::Vector2d m_tr = Kf * (r - committed.p) + m_fe;

  auto capacity = [&](int end, double sign) {
    return sign >= 0.0 ? caps.pos(end) : caps.neg(end);
  };
  auto overshoot = [&](const Eigen::Vector2d& m, int end) {
    double s = m(end) >= 0.0 ? 1.0 : -1.0;
    return std::abs(m(end)) -
           (capacity(end, s) + caps.H * committed.kappa(end));
  };

  bool active[2] = {overshoot(m_tr, 0) > 1e-12, overshoot(m_tr, 1) > 1e-12};
  Eigen::Vector2d s{m_tr(0) >= 0.0 ? 1.0 : -1.0, m_tr(1) >= 0.0 ? 1.0 : -1.0};

  // Up to a handful of active-set updates; each solve is 1x1 or 2x2.
  for (int pass = 0; pass < 5; ++pass) {
    Eigen::Vector2d gamma = Eigen::Vector2d::Zero();
    int idx[2];
    int na = 0;
    for (int end = 0; end < 2; ++end)
      if (active[end]) idx[na++] = end;
    if (na > 0) {
      Eigen::MatrixXd A(na, na);
      Eigen::VectorXd b(na);
      for (int a = 0; a < na; ++a) {
        b(a) = overshoot(m_tr, idx[a]);
        for (int c = 0; c < na; ++c)
          A(a, c) = s(idx[a]) * Kf(idx[a], idx[c]) * s(idx[c]) +
                    (a == c ? caps.H : 0.0);
      }
      Eigen::VectorXd g = A.ldlt().solve(b);
      bool dropped = false;
      for (int a = 0; a < na; ++a)
        if (g(a) < 0.0) {
          active[idx[a]] = false;
          dropped = true;
        }
      if (dropped) continue;
      for (int a = 0; a < na; ++a) gamma(idx[a]) = g(a);
    }
    Eigen::Vector2d dp = {s(0) * gamma(0), s(1) * gamma(1)};
    Eigen::Vector2d m_new = m_tr - Kf * dp;
    // Check whether a previously inactive end now violates.
    bool grew = false;
    for (int end = 0; end < 2; ++end)
      if (!active[end] && overshoot(m_new, end) > 1e-9) {
        active[end] = true;
        s(end) = m_new(end) >= 0.0 ? 1.0 : -1.0;
        grew = true;
      }
    if (grew) continue;

    out.dp = dp;
    out.m_total = m_new;
    // Consistent tangent: condense the active plastic flow out of Kf.
    if (na == 0) {
      out.K_t = Kf;
    } else {
      Eigen::MatrixXd A(na, na);
      Eigen::MatrixXd KS(2, na);
      for (int a = 0; a < na; ++a) {
        for (int c = 0; c < na; ++c)
          A(a, c) = s(idx[a]) * Kf(idx[a], idx[c]) * s(idx[c]) +
                    (a == c ? caps.H : 0.0);
        for (int rr = 0; rr < 2; ++rr) KS(rr, a) = Kf(rr, idx[a]) * s(idx[a]);
      }
      out.K_t = Kf - KS * A.ldlt().solve(KS.transpose());
    }
    return out;
  }
  // Fall through: treat as fully yielded with the last state.
  out.m_total = m_tr;
  out.K_t = Kf;
  return out;
}

struct PushContext {
  AsmModel am;
  ComboLoads gravity;
  Eigen::VectorXd F_lat;
  Eigen::MatrixXd Kg;
  std::vector<ElementCaps> caps;
  std::vector<HingePair> committed;
  std::vector<Eigen::Vector2d> m_fe;
  DofExpansion roof;  // reduced expansion of the roof lateral DOF
};

double roof_of(const PushContext& ctx, const Eigen::VectorXd& U) {
  double v = 0.0;
  for (const DofTerm& t : ctx.roof) v += t.coeff * U(t.index);
  return v;
}

struct InternalState {
  Eigen::VectorXd F_int;
  Eigen::MatrixXd K_t;
  std::vector<MappedElement> mapped;
};

InternalState internal_forces(const PushContext& ctx, const Eigen::VectorXd& U,
                              bool pdelta) {
  const AsmModel& am = ctx.am;
  InternalState st;
  st.F_int = Eigen::VectorXd::Zero(am.n_red);
  st.K_t = Eigen::MatrixXd::Zero(am.n_red, am.n_red);
  st.mapped.resize(am.elems.size());
  for (size_t ei = 0; ei < am.elems.size(); ++ei) {
    const Element& e = am.elems[ei];
    BasicKinematics kin = basic_kinematics(e);
    Eigen::Matrix<double, 6, 1> ug = gather_element_disp(am, e, U);
    Eigen::Vector3d basic = kin.BG * ug;
    Eigen::Matrix2d Kf = flexural_stiffness(e);
    MappedElement me = return_map(Kf, basic.tail<2>(), ctx.m_fe[ei],
                                  ctx.committed[ei], ctx.caps[ei]);
    st.mapped[ei] = me;

    double N = e.EA / e.L * basic(0);
    Eigen::Vector3d f_basic;
    // Homogeneous part only; the particular (fixed-end) part lives in the
    // external gravity vector.
    f_basic << N, me.m_total(0) - ctx.m_fe[ei](0),
        me.m_total(1) - ctx.m_fe[ei](1);
    Eigen::Matrix<double, 6, 1> fg = kin.BG.transpose() * f_basic;
    add_element_vector(am, e, fg, st.F_int);

    Eigen::Matrix3d kb = Eigen::Matrix3d::Zero();
    kb(0, 0) = e.EA / e.L;
    kb.block<2, 2>(1, 1) = me.K_t;
    Eigen::Matrix<double, 6, 6> ke = kin.BG.transpose() * kb * kin.BG;
    add_element_matrix(am, e, ke, st.K_t);
  }
  for (int i = 0; i < am.n_red; ++i)
    if (st.K_t(i, i) == 0.0) st.K_t(i, i) = 1.0;
  if (pdelta) {
    st.F_int += ctx.Kg * U;
    st.K_t += ctx.Kg;
  }
  return st;
}

// Records the committed state (call after committing plastic rotations).
void record_step(const PushContext& ctx, const Eigen::VectorXd& U,
                 double lambda, PushoverTrace& trace) {
  const FrameModel& model = *ctx.am.sized->model;
  PushStep ps;
  ps.lambda = lambda;
  ps.base_shear = lambda;  // unit-normalized pattern
  double prev = 0.0;
  for (int s = 1; s <= model.n_stories; ++s) {
    double u = recover_dof(ctx.am, model.node_at(s, 0), 0, U);
    ps.story_disp.push_back(u);
    ps.drift.push_back((u - prev) /
                       model.stories[static_cast<size_t>(s - 1)].height_m);
    prev = u;
  }
  ps.roof_disp = roof_of(ctx, U);
  ps.hinge_rot.resize(2 * ctx.am.elems.size(), 0.0);
  for (size_t ei = 0; ei < ctx.am.elems.size(); ++ei) {
    ps.hinge_rot[2 * ei + 0] = ctx.committed[ei].p(0);
    ps.hinge_rot[2 * ei + 1] = ctx.committed[ei].p(1);
  }
  trace.steps.push_back(std::move(ps));
}

}  // namespace

PushoverTrace pushover(const SizedFrame& sized, const LateralPattern& pattern,
                       const PushoverControl& control) {
  PushoverTrace trace;
  trace.n_stories = sized.model->n_stories;

  PushContext ctx{build_asm(sized),
                  {},
                  {},
                  {},
                  {},
                  {},
                  {},
                  {}};
  const AsmModel& am = ctx.am;
  ctx.gravity = build_gravity_loads(am, control.gravity);
  ctx.F_lat = build_lateral_loads(am, pattern);
  ctx.roof =
      expansion(am, sized.model->node_at(sized.model->n_stories, 0), 0);
  if (ctx.roof.empty())
    throw std::runtime_error("pushover: roof DOF is fixed");
  bool zero_pattern = ctx.F_lat.lpNorm<Eigen::Infinity>() == 0.0;

  size_t ne = am.elems.size();
  ctx.m_fe.assign(ne, Eigen::Vector2d::Zero());
  for (size_t ei = 0; ei < ne; ++ei)
    ctx.m_fe[ei] = {ctx.gravity.f0[ei](2), ctx.gravity.f0[ei](5)};
  ctx.committed.assign(ne, HingePair{});
  // Hinges disabled for the gravity stage: capacities resolve afterwards
  // from the gravity axial forces.
  ctx.caps.assign(ne, ElementCaps{});
  ctx.Kg = Eigen::MatrixXd::Zero(am.n_red, am.n_red);

  // Stage 1: gravity, elastic (capacities are not axial-resolved yet).
  InternalState st0 = internal_forces(ctx, Eigen::VectorXd::Zero(am.n_red),
                                      false);
  SolveOutcome grav = solve_spd(st0.K_t, ctx.gravity.F);
  if (!grav.ok) {
    trace.termination = "gravity mechanism: " + grav.error;
    return trace;
  }
  Eigen::VectorXd U = grav.U;

  // Axial forces at the gravity state set the hinge capacities and the
  // geometric stiffness.
  std::vector<double> axial(ne, 0.0);
  for (size_t ei = 0; ei < ne; ++ei) {
    const Element& e = am.elems[ei];
    BasicKinematics kin = basic_kinematics(e);
    Eigen::Vector3d basic = kin.BG * gather_element_disp(am, e, U);
    axial[ei] = -e.EA / e.L * basic(0);  // compression positive
  }
  trace.gravity_axial = axial;

  const FrameModel& model = *sized.model;
  trace.hinge_yield_pos.assign(2 * ne, 0.0);
  trace.hinge_yield_neg.assign(2 * ne, 0.0);
  for (size_t ei = 0; ei < ne; ++ei) {
    const Element& e = am.elems[ei];
    const SizedMember& sm = sized.members[static_cast<size_t>(e.member)];
    const Member& m = model.members[static_cast<size_t>(e.member)];
    ElementCaps caps;
    caps.H = control.hinge_hardening * 6.0 * e.EI / e.L;
    double My_pos = 0.0, My_neg = 0.0;  // bending-sense capacities
    switch (m.kind) {
      case MemberKind::beam:
        My_pos = sm.caps.M_n_pos;
        My_neg = sm.caps.M_n_neg;
        break;
      case MemberKind::column: {
        double My = sized.column_diagrams[static_cast<size_t>(m.group)]
                        .moment_at(axial[ei]);
        My_pos = My_neg = std::max(My, 1e-6);
        break;
      }
      case MemberKind::wall: {
        double l_w_mm = model.bays[static_cast<size_t>(m.bay - 1)] * 1e3;
        double My = wall_moment_capacity(sm.wall_rec, sized.materials,
                                         sized.rules, l_w_mm, axial[ei]);
        My_pos = My_neg = std::max(My, 1e-6);
        break;
      }
    }
    // Basic moment at end i is hogging-positive, at end j sagging-positive.
    caps.pos(0) = My_neg;
    caps.neg(0) = My_pos;
    caps.pos(1) = My_pos;
    caps.neg(1) = My_neg;
    ctx.caps[ei] = caps;
  }
  if (control.pdelta) ctx.Kg = build_geometric_stiffness(am, axial);

  // Re-equilibrate gravity with hinges armed (and P-Delta if enabled).
  double lambda = 0.0;
  double F_ref = std::max(1.0, ctx.gravity.F.lpNorm<Eigen::Infinity>());
  {
    bool done = false;
    for (int it = 0; it < control.max_newton; ++it) {
      InternalState st = internal_forces(ctx, U, control.pdelta);
      Eigen::VectorXd R = ctx.gravity.F - st.F_int;
      if (R.lpNorm<Eigen::Infinity>() <= control.tolerance * F_ref) {
        for (size_t ei = 0; ei < ne; ++ei) {
          ctx.committed[ei].p += st.mapped[ei].dp;
          ctx.committed[ei].kappa += st.mapped[ei].dp.cwiseAbs();
        }
        record_step(ctx, U, 0.0, trace);
        done = true;
        break;
      }
      SolveOutcome du = solve_spd(st.K_t, R);
      if (!du.ok) {
        trace.termination = "gravity state: " + du.error;
        return trace;
      }
      U += du.U;
    }
    if (!done) {
      trace.termination = "gravity state did not converge";
      return trace;
    }
  }

  if (zero_pattern) {
    // Nothing to push against: the trace stays at the gravity state.
    for (int step = 1; step <= control.steps; ++step)
      record_step(ctx, U, 0.0, trace);
    trace.completed = true;
    trace.termination = "target";
    return trace;
  }

  // Initial lateral stiffness from the tangent at the gravity state.
  {
    InternalState st = internal_forces(ctx, U, control.pdelta);
    SolveOutcome dup = solve_spd(st.K_t, ctx.F_lat);
    if (!dup.ok) {
      trace.termination = "initial stiffness: " + dup.error;
      return trace;
    }
    double dr = 0.0;
    for (const DofTerm& t : ctx.roof) dr += t.coeff * dup.U(t.index);
    if (dr <= 0.0) {
      trace.termination = "instability";
      return trace;
    }
    trace.K_i = 1.0 / dr;
  }

  double u0 = roof_of(ctx, U);  // gravity sway offset
  double du_target = control.target_roof_disp_m / control.steps;

  // Advances the state to the given roof displacement; commits plastic
  // rotations only on convergence. Returns "" on success, otherwise the
  // termination reason; a plain convergence failure leaves the state intact
  // so the caller can retry with a smaller increment.
  auto advance = [&](double u_star) -> std::string {
    Eigen::VectorXd U_save = U;
    double lambda_save = lambda;
    for (int it = 0; it < control.max_newton; ++it) {
      InternalState st = internal_forces(ctx, U, control.pdelta);
      Eigen::VectorXd R = ctx.gravity.F + lambda * ctx.F_lat - st.F_int;
      double res = R.lpNorm<Eigen::Infinity>();
      double gap = u_star - roof_of(ctx, U);
      if (res <= control.tolerance * std::max(F_ref, std::abs(lambda)) &&
          std::abs(gap) <= 1e-12 + 1e-9 * std::abs(u_star)) {
        for (size_t ei = 0; ei < ne; ++ei) {
          ctx.committed[ei].p += st.mapped[ei].dp;
          ctx.committed[ei].kappa += st.mapped[ei].dp.cwiseAbs();
        }
        return "";
      }
      Eigen::LDLT<Eigen::MatrixXd> ldlt(st.K_t);
      if (ldlt.info() != Eigen::Success ||
          !(ldlt.vectorD().minCoeff() > 0.0)) {
        U = U_save;
        lambda = lambda_save;
        return "instability";
      }
      Eigen::VectorXd dUr = ldlt.solve(R);
      Eigen::VectorXd dUp = ldlt.solve(ctx.F_lat);
      double drp = 0.0, drr = 0.0;
      for (const DofTerm& t : ctx.roof) {
        drp += t.coeff * dUp(t.index);
        drr += t.coeff * dUr(t.index);
      }
      if (std::abs(drp) < 1e-30) {
        U = U_save;
        lambda = lambda_save;
        return "instability";
      }
      double dlambda = (gap - drr) / drp;
      U += dUr + dlambda * dUp;
      lambda += dlambda;
    }
    U = U_save;
    lambda = lambda_save;
    return "step did not converge";
  };

  for (int step = 1; step <= control.steps; ++step) {
    double u_star = u0 + du_target * step;
    // Hinge activations can make the Newton iteration cycle; on failure the
    // sub-increment is halved (and grown back after successes) so each
    // sub-step crosses at most a benign transition.
    double u_cur = roof_of(ctx, U);
    double du_try = u_star - u_cur;
    int halvings = 0;
    std::string fail;
    while (u_star - u_cur > 1e-12 + 1e-9 * std::abs(u_star)) {
      double du = std::min(du_try, u_star - u_cur);
      std::string err = advance(u_cur + du);
      if (err.empty()) {
        u_cur = roof_of(ctx, U);
        if (halvings > 0) {
          --halvings;
          du_try *= 2.0;
        }
        continue;
      }
      if (err == "step did not converge" && halvings < 16) {
        ++halvings;
        du_try *= 0.5;
        continue;
      }
      fail = err;
      break;
    }
    if (!fail.empty()) {
      trace.termination = fail;
      return trace;
    }
    record_step(ctx, U, lambda, trace);
    if (lambda < 0.0) {
      trace.termination = "resistance exhausted";
      return trace;
    }
  }
  trace.completed = true;
  trace.termination = "target";
  return trace;
}

void write_trace_csv(const std::string& path, const PushoverTrace& trace) {
  CsvTable t;
  t.header = {"step", "load_factor", "base_shear_kN", "roof_disp_m"};
  for (int s = 1; s <= trace.n_stories; ++s)
    t.header.push_back("drift_" + std::to_string(s));
  for (size_t i = 0; i < trace.steps.size(); ++i) {
    const PushStep& ps = trace.steps[i];
    std::vector<std::string> row = {std::to_string(i),
                                    format_double(ps.lambda),
                                    format_double(ps.base_shear),
                                    format_double(ps.roof_disp)};
    for (double d : ps.drift) row.push_back(format_double(d));
    t.rows.push_back(std::move(row));
  }
  write_csv(path, t);
}

StateAt state_at(const PushoverTrace& trace, double roof_disp) {
  StateAt out;
  if (trace.steps.empty()) return out;
  double u0 = trace.steps.front().roof_disp;
  double target = roof_disp + u0;  // displacement beyond the gravity state
  const PushStep* prev = &trace.steps.front();
  for (size_t i = 1; i < trace.steps.size(); ++i) {
    const PushStep& cur = trace.steps[i];
    if (target <= cur.roof_disp + 1e-15) {
      double span = cur.roof_disp - prev->roof_disp;
      double t = span <= 0.0 ? 1.0 : (target - prev->roof_disp) / span;
      out.reached = true;
      out.drift.resize(cur.drift.size());
      for (size_t k = 0; k < cur.drift.size(); ++k)
        out.drift[k] = prev->drift[k] + t * (cur.drift[k] - prev->drift[k]);
      out.hinge_rot.resize(cur.hinge_rot.size());
      for (size_t k = 0; k < cur.hinge_rot.size(); ++k)
        out.hinge_rot[k] =
            prev->hinge_rot[k] + t * (cur.hinge_rot[k] - prev->hinge_rot[k]);
      out.base_shear = prev->base_shear + t * (cur.base_shear - prev->base_shear);
      return out;
    }
    prev = &cur;
  }
  return out;  // beyond the attained range
}

double rayleigh_period(const SizedFrame& sized, const LateralPattern& pattern) {
  LinearResult res = linear_static(sized, LoadCombination{ComboTag::Gpbd,
                                                          0.0, 0.0, 1.0, 1},
                                   1.0);
  if (!res.ok) throw std::runtime_error("rayleigh period: " + res.error);
  const FrameModel& model = *sized.model;
  double num = 0.0, den = 0.0;
  for (int s = 0; s < model.n_stories; ++s) {
    double u = res.story_disp[static_cast<size_t>(s)];
    num += model.story_mass_t(s) * u * u;           // t = kN s^2 / m
    den += pattern.story_forces[static_cast<size_t>(s)] * u;
  }
  if (den <= 0.0)
    throw std::runtime_error("rayleigh period: nonpositive work");
  return 2.0 * 3.14159265358979323846 * std::sqrt(num / den);
}

BilinearFit fit_bilinear(const PushoverTrace& trace) {
  BilinearFit fit;
  fit.K_i = trace.K_i;
  if (trace.steps.size() < 3) return fit;

  double u0 = trace.steps.front().roof_disp;
  std::vector<double> u, v;
  for (const PushStep& s : trace.steps) {
    u.push_back(s.roof_disp - u0);
    v.push_back(s.base_shear);
  }
  double V_peak = *std::max_element(v.begin(), v.end());
  if (V_peak <= 0.0) return fit;
  double u_end = u.back();
  double V_end = v.back();
  double area = 0.0;
  for (size_t i = 1; i < u.size(); ++i)
    area += 0.5 * (v[i] + v[i - 1]) * (u[i] - u[i - 1]);

  auto disp_at_shear = [&](double vv) {
    for (size_t i = 1; i < u.size(); ++i)
      if (v[i] >= vv)
        return u[i - 1] + (vv - v[i - 1]) / (v[i] - v[i - 1]) * (u[i] - u[i - 1]);
    return u.back();
  };

  // Fixed-point on V_y: secant stiffness at 0.6 V_y, then equal area.
  double V_y = 0.8 * V_peak;
  double K_e = fit.K_i;
  for (int it = 0; it < 100; ++it) {
    double u06 = disp_at_shear(0.6 * V_y);
    if (u06 <= 0.0) break;
    K_e = 0.6 * V_y / u06;
    double u_y = V_y / K_e;
    if (u_y >= u_end) {
      V_y = K_e * u_end * 0.99;
      continue;
    }
    // Equal energy: 0.5 u_y V_y + 0.5 (V_y + V_end)(u_end - u_y) = area,
    // with u_y = V_y / K_e, solved for V_y.
    double V_new = (2.0 * area - V_end * u_end) / (u_end - V_end / K_e);
    if (!(V_new > 0.0) || !std::isfinite(V_new)) break;
    if (std::abs(V_new - V_y) <= 1e-10 * V_peak) {
      V_y = V_new;
      break;
    }
    V_y = 0.5 * (V_y + V_new);
  }
  fit.K_e = K_e;
  fit.V_y = V_y;
  fit.u_y = V_y / K_e;
  return fit;
}

double effective_period(double T_i, double K_i, double K_e) {
  if (T_i <= 0.0 || K_i <= 0.0 || K_e <= 0.0)
    throw std::runtime_error("effective_period: inputs must be positive");
  return T_i * std::sqrt(K_i / K_e);
}

double target_displacement(const TargetDisplacementInputs& in) {
  for (double v : {in.C0, in.C1, in.C2, in.C3, in.S_a, in.T_e, in.g})
    if (v < 0.0)
      throw std::runtime_error("target_displacement: negative factor");
  constexpr double pi = 3.14159265358979323846;
  return in.C0 * in.C1 * in.C2 * in.C3 * in.S_a *
         (in.T_e * in.T_e / (4.0 * pi * pi)) * in.g;
}

double c0_factor(int n_stories) {
  static const std::vector<std::pair<double, double>> table = {
      {1.0, 1.0}, {2.0, 1.2}, {3.0, 1.3}, {5.0, 1.4}, {10.0, 1.5}};
  double n = static_cast<double>(n_stories);
  if (n <= table.front().first) return table.front().second;
  if (n >= table.back().first) return table.back().second;
  for (size_t i = 1; i < table.size(); ++i)
    if (n <= table[i].first) {
      double t = (n - table[i - 1].first) /
                 (table[i].first - table[i - 1].first);
      return table[i - 1].second +
             t * (table[i].second - table[i - 1].second);
    }
  return table.back().second;
}

}  // namespace framepbo
