#include "framepbo/sections.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "framepbo/csvio.hpp"

namespace framepbo {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kEpsCu = 0.003;  // crushing strain of concrete

struct SteelRow {
  double y = 0.0;     // depth from extreme compression fiber, mm
  double area = 0.0;  // mm^2
};

// Stress in a steel row for neutral-axis depth c, compression positive.
double row_stress(const SteelRow& row, double c, const Materials& mat) {
  double eps = kEpsCu * (c - row.y) / c;
  double fs = mat.es_mpa * eps;
  return std::clamp(fs, -mat.fy_mpa, mat.fy_mpa);
}

struct SectionForces {
  double P = 0.0;  // N, compression positive
  double M = 0.0;  // N.mm about mid-depth, sagging positive
};

// Rectangular section: stress block plus steel rows. Steel inside the block
// has the displaced concrete deducted so the c->inf limit matches the
// pure-compression strength.
SectionForces rect_section_forces(double b, double h,
                                  const std::vector<SteelRow>& rows, double c,
                                  const Materials& mat) {
  SectionForces out;
  double a = std::min(mat.beta1() * c, h);
  double fc85 = 0.85 * mat.fc_prime_mpa;
  out.P = fc85 * b * a;
  out.M = fc85 * b * a * (h / 2.0 - a / 2.0);
  for (const auto& row : rows) {
    double fs = row_stress(row, c, mat);
    if (row.y < a && fs > 0.0) fs -= fc85;
    out.P += row.area * fs;
    out.M += row.area * fs * (h / 2.0 - row.y);
  }
  return out;
}

// Neutral-axis depth at which the section carries axial load P_target (N).
// P(c) is monotone increasing, so plain bisection is enough.
double solve_neutral_axis(double b, double h, const std::vector<SteelRow>& rows,
                          double P_target, const Materials& mat) {
  double lo = 1e-6, hi = 10.0 * h;
  double f_hi = rect_section_forces(b, h, rows, hi, mat).P - P_target;
  if (f_hi < 0.0) return hi;  // demand above squash load; caller caps via P_n_max
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    double f = rect_section_forces(b, h, rows, mid, mat).P - P_target;
    if (f >= 0.0)
      hi = mid;
    else
      lo = mid;
    if (hi - lo < 1e-10 * h) break;
  }
  return 0.5 * (lo + hi);
}

double clear_spacing(double width, double n_bars, double db,
                     const SectionRules& rules) {
  if (n_bars < 2.0) return 1e9;
  double free_width =
      width - 2.0 * (rules.cover_mm + rules.stirrup_diameter_mm) - n_bars * db;
  return free_width / (n_bars - 1.0);
}

BarGroup parse_bars(const std::string& text, const std::string& context) {
  auto x = text.find('x');
  if (x == std::string::npos)
    throw std::runtime_error(context + ": bad bar spec '" + text +
                             "' (want COUNTxDIAMETER)");
  BarGroup g;
  try {
    g.count = std::stoi(text.substr(0, x));
    g.diameter_mm = std::stod(text.substr(x + 1));
  } catch (const std::exception&) {
    throw std::runtime_error(context + ": bad bar spec '" + text + "'");
  }
  if (g.count < 2 || g.diameter_mm <= 0.0)
    throw std::runtime_error(context + ": bad bar spec '" + text + "'");
  return g;
}

std::string format_bars(const BarGroup& g) {
  std::ostringstream os;
  os << g.count << "x" << format_double(g.diameter_mm);
  return os.str();
}

template <typename Record>
void check_ids(const Catalog<Record>& cat, const std::string& what) {
  for (int i = 0; i < cat.size(); ++i) {
    int id = cat.rows[static_cast<size_t>(i)].id;
    if (id != i + 1)
      throw std::runtime_error(what + ": ids must be contiguous from 1 (got " +
                               std::to_string(id) + " at position " +
                               std::to_string(i + 1) + ")");
  }
}

template <typename Record, typename WeightFn>
void finish_catalog(Catalog<Record>& cat, const std::string& what,
                    WeightFn unit_weight) {
  if (cat.rows.empty())
    throw std::runtime_error(what + ": catalog has no rows");
  std::sort(cat.rows.begin(), cat.rows.end(),
            [](const Record& a, const Record& b) { return a.id < b.id; });
  for (size_t i = 1; i < cat.rows.size(); ++i)
    if (cat.rows[i].id == cat.rows[i - 1].id)
      throw std::runtime_error(what + ": duplicate id " +
                               std::to_string(cat.rows[i].id));
  check_ids(cat, what);
  cat.ids_by_unit_weight.resize(cat.rows.size());
  for (int i = 0; i < cat.size(); ++i) cat.ids_by_unit_weight[static_cast<size_t>(i)] = i + 1;
  std::stable_sort(cat.ids_by_unit_weight.begin(), cat.ids_by_unit_weight.end(),
                   [&](int a, int b) {
                     return unit_weight(cat.rows[static_cast<size_t>(a - 1)]) <
                            unit_weight(cat.rows[static_cast<size_t>(b - 1)]);
                   });
  bool ordered = true;
  for (size_t i = 0; i < cat.ids_by_unit_weight.size(); ++i)
    if (cat.ids_by_unit_weight[i] != static_cast<int>(i) + 1) ordered = false;
  if (!ordered)
    cat.warnings.push_back(what + ": unit weight is not monotone in id");
}

double read_num(const CsvTable& t, size_t row, const std::string& col,
                const std::string& what) {
  const std::string& s = t.cell(row, col);
  try {
    return std::stod(s);
  } catch (const std::exception&) {
    throw std::runtime_error(what + " row " + std::to_string(row + 1) +
                             ": bad numeric value '" + s + "' in column " + col);
  }
}

}  // namespace

double Materials::elastic_modulus_concrete() const {
  return ec_mpa > 0.0 ? ec_mpa : 4700.0 * std::sqrt(fc_prime_mpa);
}

double Materials::beta1() const {
  return std::clamp(0.85 - 0.05 * (fc_prime_mpa - 28.0) / 7.0, 0.65, 0.85);
}

double Materials::rho_balanced() const {
  double eps_y_num = kEpsCu * es_mpa;
  return 0.85 * beta1() * fc_prime_mpa / fy_mpa * eps_y_num /
         (eps_y_num + fy_mpa);
}

void Materials::validate() const {
  if (fc_prime_mpa <= 0.0 || fy_mpa <= 0.0 || es_mpa <= 0.0)
    throw std::runtime_error("materials: strengths and moduli must be positive");
  if (rho_steel <= 0.0 || rho_concrete <= 0.0)
    throw std::runtime_error("materials: densities must be positive");
  if (phi_flexure <= 0.0 || phi_flexure > 1.0 || phi_compression <= 0.0 ||
      phi_compression > 1.0 || phi_shear <= 0.0 || phi_shear > 1.0)
    throw std::runtime_error("materials: phi factors must lie in (0, 1]");
}

double BarGroup::area_mm2() const { return count * bar_area(diameter_mm); }

double bar_area(double diameter_mm) {
  return kPi * diameter_mm * diameter_mm / 4.0;
}

double InteractionDiagram::moment_at(double P) const {
  if (points.empty()) throw std::runtime_error("interaction diagram is empty");
  if (P <= points.front().P) return points.front().M;
  if (P >= points.back().P) return points.back().M;
  for (size_t i = 1; i < points.size(); ++i) {
    if (P <= points[i].P) {
      double span = points[i].P - points[i - 1].P;
      if (span <= 0.0) return std::min(points[i - 1].M, points[i].M);
      double t = (P - points[i - 1].P) / span;
      return points[i - 1].M + t * (points[i].M - points[i - 1].M);
    }
  }
  return points.back().M;
}

template <typename Record>
const Record& Catalog<Record>::by_id(int id) const {
  if (id < 1 || id > size())
    throw std::runtime_error("catalog id " + std::to_string(id) +
                             " out of range [1, " + std::to_string(size()) + "]");
  return rows[static_cast<size_t>(id - 1)];
}

template struct Catalog<BeamSectionRecord>;
template struct Catalog<ColumnSectionRecord>;
template struct Catalog<WallSectionRecord>;

Catalog<BeamSectionRecord> load_beam_catalog(const std::string& path) {
  CsvTable t = read_csv(path);
  Catalog<BeamSectionRecord> cat;
  for (size_t r = 0; r < t.rows.size(); ++r) {
    std::string what = "beam catalog";
    BeamSectionRecord rec;
    rec.id = static_cast<int>(read_num(t, r, "id", what));
    rec.depth_mm = read_num(t, r, "depth_mm", what);
    rec.width_mm = read_num(t, r, "width_mm", what);
    std::string ctx = what + " id " + std::to_string(rec.id);
    rec.bot_bars = parse_bars(t.cell(r, "bot_bars"), ctx);
    rec.top_bars = parse_bars(t.cell(r, "top_bars"), ctx);
    rec.reconstructed = read_num(t, r, "reconstructed", what) != 0.0;
    if (rec.depth_mm <= 0.0 || rec.width_mm <= 0.0)
      throw std::runtime_error(ctx + ": dimensions must be positive");
    cat.rows.push_back(rec);
  }
  finish_catalog(cat, "beam catalog", [](const BeamSectionRecord& b) {
    return 2400.0 * b.depth_mm * b.width_mm +
           7850.0 * (b.bot_bars.area_mm2() + b.top_bars.area_mm2());
  });
  return cat;
}

Catalog<ColumnSectionRecord> load_column_catalog(const std::string& path) {
  CsvTable t = read_csv(path);
  Catalog<ColumnSectionRecord> cat;
  for (size_t r = 0; r < t.rows.size(); ++r) {
    std::string what = "column catalog";
    ColumnSectionRecord rec;
    rec.id = static_cast<int>(read_num(t, r, "id", what));
    rec.side_mm = read_num(t, r, "side_mm", what);
    std::string ctx = what + " id " + std::to_string(rec.id);
    rec.bars = parse_bars(t.cell(r, "bars"), ctx);
    rec.reconstructed = read_num(t, r, "reconstructed", what) != 0.0;
    if (rec.side_mm <= 0.0)
      throw std::runtime_error(ctx + ": dimensions must be positive");
    if (rec.bars.count % 4 != 0)
      throw std::runtime_error(ctx + ": bar count must be a multiple of 4");
    double rho = rec.bars.area_mm2() / (rec.side_mm * rec.side_mm);
    if (rho < 0.01 - 1e-12 || rho > 0.08 + 1e-12)
      cat.warnings.push_back(ctx + ": reinforcement ratio " +
                             format_double(rho) + " outside [0.01, 0.08]");
    cat.rows.push_back(rec);
  }
  finish_catalog(cat, "column catalog", [](const ColumnSectionRecord& c) {
    return 2400.0 * c.side_mm * c.side_mm + 7850.0 * c.bars.area_mm2();
  });
  return cat;
}

Catalog<WallSectionRecord> load_wall_catalog(const std::string& path) {
  CsvTable t = read_csv(path);
  Catalog<WallSectionRecord> cat;
  for (size_t r = 0; r < t.rows.size(); ++r) {
    std::string what = "wall catalog";
    WallSectionRecord rec;
    rec.id = static_cast<int>(read_num(t, r, "id", what));
    rec.t_w_mm = read_num(t, r, "t_w_mm", what);
    rec.t_f_mm = read_num(t, r, "t_f_mm", what);
    rec.s_sh_mm = read_num(t, r, "s_sh_mm", what);
    rec.b_f_mm = read_num(t, r, "b_f_mm", what);
    rec.bar_diameter_mm = read_num(t, r, "bar_diameter_mm", what);
    rec.reconstructed = read_num(t, r, "reconstructed", what) != 0.0;
    std::string ctx = what + " id " + std::to_string(rec.id);
    if (rec.t_w_mm <= 0.0 || rec.s_sh_mm <= 0.0 || rec.bar_diameter_mm <= 0.0)
      throw std::runtime_error(ctx + ": dimensions must be positive");
    if ((rec.t_f_mm > 0.0) != (rec.b_f_mm > 0.0))
      throw std::runtime_error(
          ctx + ": boundary element needs both t_f and b_f (or neither)");
    if (rec.t_f_mm > 0.0 && rec.t_f_mm < rec.t_w_mm)
      throw std::runtime_error(ctx + ": boundary thickness below web thickness");
    cat.rows.push_back(rec);
  }
  finish_catalog(cat, "wall catalog", [](const WallSectionRecord& w) {
    return w.t_w_mm * 1000.0 + 2.0 * (w.t_f_mm - w.t_w_mm) * w.b_f_mm;
  });
  return cat;
}

SectionCatalogs load_catalogs(const std::string& dir) {
  SectionCatalogs out;
  out.beams = load_beam_catalog(dir + "/beam_sections.csv");
  out.columns = load_column_catalog(dir + "/column_sections.csv");
  out.walls = load_wall_catalog(dir + "/wall_sections.csv");
  return out;
}

void save_beam_catalog(const std::string& path,
                       const Catalog<BeamSectionRecord>& cat) {
  CsvTable t;
  t.header = {"id", "depth_mm", "width_mm", "bot_bars", "top_bars",
              "reconstructed"};
  for (const auto& r : cat.rows)
    t.rows.push_back({std::to_string(r.id), format_double(r.depth_mm),
                      format_double(r.width_mm), format_bars(r.bot_bars),
                      format_bars(r.top_bars), r.reconstructed ? "1" : "0"});
  write_csv(path, t);
}

void save_column_catalog(const std::string& path,
                         const Catalog<ColumnSectionRecord>& cat) {
  CsvTable t;
  t.header = {"id", "side_mm", "bars", "reconstructed"};
  for (const auto& r : cat.rows)
    t.rows.push_back({std::to_string(r.id), format_double(r.side_mm),
                      format_bars(r.bars), r.reconstructed ? "1" : "0"});
  write_csv(path, t);
}

void save_wall_catalog(const std::string& path,
                       const Catalog<WallSectionRecord>& cat) {
  CsvTable t;
  t.header = {"id",       "t_w_mm",          "t_f_mm",       "s_sh_mm",
              "b_f_mm",   "bar_diameter_mm", "reconstructed"};
  for (const auto& r : cat.rows)
    t.rows.push_back({std::to_string(r.id), format_double(r.t_w_mm),
                      format_double(r.t_f_mm), format_double(r.s_sh_mm),
                      format_double(r.b_f_mm), format_double(r.bar_diameter_mm),
                      r.reconstructed ? "1" : "0"});
  write_csv(path, t);
}

SectionCapacities derive_beam_capacities(const BeamSectionRecord& rec,
                                         const Materials& mat,
                                         const SectionRules& rules) {
  SectionCapacities cap;
  double b = rec.width_mm, h = rec.depth_mm;
  cap.A_g = b * h;
  cap.A_s_total = rec.bot_bars.area_mm2() + rec.top_bars.area_mm2();
  cap.rho = cap.A_s_total / cap.A_g;
  cap.I_eff = rules.beam_ieff_factor * b * h * h * h / 12.0;
  cap.rho_bal = mat.rho_balanced();

  auto layer_depth = [&](const BarGroup& g, bool from_top) {
    double d = rules.cover_mm + rules.stirrup_diameter_mm + g.diameter_mm / 2.0;
    return from_top ? d : h - d;
  };

  // Positive (sagging): bottom steel in tension, compression face on top.
  auto bend = [&](const BarGroup& tension, const BarGroup& compression,
                  double& eps_t_out) {
    std::vector<SteelRow> rows = {
        {layer_depth(compression, true), compression.area_mm2()},
        {layer_depth(tension, false), tension.area_mm2()}};
    double c = solve_neutral_axis(b, h, rows, 0.0, mat);
    SectionForces f = rect_section_forces(b, h, rows, c, mat);
    eps_t_out = kEpsCu * (rows[1].y - c) / c;
    return f.M / 1e6;  // kN.m
  };

  double eps_pos = 0.0, eps_neg = 0.0;
  cap.M_n_pos = bend(rec.bot_bars, rec.top_bars, eps_pos);
  cap.M_n_neg = bend(rec.top_bars, rec.bot_bars, eps_neg);
  cap.eps_t = std::min(eps_pos, eps_neg);

  double d_eff = h - layer_depth(rec.bot_bars, true);
  double sqrt_fc = std::sqrt(mat.fc_prime_mpa);
  double V_c = 0.17 * sqrt_fc * b * d_eff / 1e3;
  double A_v = 2.0 * bar_area(rules.stirrup_diameter_mm);
  cap.V_s = A_v * mat.fy_mpa * d_eff / rules.stirrup_spacing_mm / 1e3;
  cap.V_s_max = 0.66 * sqrt_fc * b * d_eff / 1e3;
  cap.V_n = V_c + std::min(cap.V_s, cap.V_s_max);
  cap.A_st_min =
      std::max(0.25 * sqrt_fc, 1.4) / mat.fy_mpa * b * d_eff;
  double S_bot = clear_spacing(b, rec.bot_bars.count, rec.bot_bars.diameter_mm,
                               rules);
  double S_top = clear_spacing(b, rec.top_bars.count, rec.top_bars.diameter_mm,
                               rules);
  cap.S = std::min(S_bot, S_top);
  cap.S_min = std::max(rules.min_clear_spacing_mm,
                       std::max(rec.bot_bars.diameter_mm,
                                rec.top_bars.diameter_mm));
  return cap;
}

namespace {

// Perimeter bars on a square column: count/4 + 1 bars per face, corners
// shared; interior faces contribute rows of two bars between the end rows.
std::vector<SteelRow> column_rows(const ColumnSectionRecord& rec,
                                  const SectionRules& rules) {
  int n = rec.bars.count;
  int per_face = n / 4 + 1;
  double db = rec.bars.diameter_mm;
  double d1 = rules.cover_mm + rules.stirrup_diameter_mm + db / 2.0;
  double d2 = rec.side_mm - d1;
  double ab = bar_area(db);
  std::vector<SteelRow> rows;
  rows.push_back({d1, per_face * ab});
  int inner = per_face - 2;
  for (int i = 1; i <= inner; ++i) {
    double y = d1 + (d2 - d1) * i / (inner + 1);
    rows.push_back({y, 2.0 * ab});
  }
  rows.push_back({d2, per_face * ab});
  return rows;
}

}  // namespace

InteractionDiagram build_interaction(const ColumnSectionRecord& rec,
                                     const Materials& mat,
                                     const SectionRules& rules) {
  double h = rec.side_mm, b = rec.side_mm;
  std::vector<SteelRow> rows = column_rows(rec, rules);
  double A_st = rec.bars.area_mm2();
  double P0 = (0.85 * mat.fc_prime_mpa * (b * h - A_st) + mat.fy_mpa * A_st) / 1e3;

  InteractionDiagram dia;
  double P_t = -A_st * mat.fy_mpa / 1e3;
  dia.points.push_back({P_t, 0.0});  // pure tension
  // Neutral-axis samples at equally spaced axial-load targets, so the
  // polyline stays accurate where moment demands are checked.
  int n = std::max(2, rules.interaction_points);
  for (int i = 1; i <= n; ++i) {
    double target = (P_t + (P0 - P_t) * i / (n + 1)) * 1e3;
    double c = solve_neutral_axis(b, h, rows, target, mat);
    SectionForces f = rect_section_forces(b, h, rows, c, mat);
    dia.points.push_back({f.P / 1e3, std::max(0.0, f.M / 1e6)});
  }
  dia.points.push_back({P0, 0.0});  // pure compression
  std::sort(dia.points.begin(), dia.points.end(),
            [](const InteractionPoint& a, const InteractionPoint& x) {
              return a.P < x.P;
            });
  return dia;
}

SectionCapacities derive_column_capacities(const ColumnSectionRecord& rec,
                                           const Materials& mat,
                                           const SectionRules& rules,
                                           double P_u_kn) {
  SectionCapacities cap;
  double s = rec.side_mm;
  cap.A_g = s * s;
  cap.A_s_total = rec.bars.area_mm2();
  cap.rho = cap.A_s_total / cap.A_g;
  cap.I_eff = rules.column_ieff_factor * s * s * s * s / 12.0;
  cap.rho_bal = mat.rho_balanced();

  double P0 =
      (0.85 * mat.fc_prime_mpa * (cap.A_g - cap.A_s_total) +
       mat.fy_mpa * cap.A_s_total) / 1e3;
  cap.P_n_max = 0.80 * P0;

  InteractionDiagram dia = build_interaction(rec, mat, rules);
  cap.M_n_pos = dia.moment_at(P_u_kn);
  cap.M_n_neg = cap.M_n_pos;

  double db = rec.bars.diameter_mm;
  double d_eff = s - (rules.cover_mm + rules.stirrup_diameter_mm + db / 2.0);
  double sqrt_fc = std::sqrt(mat.fc_prime_mpa);
  double V_c = 0.17 * sqrt_fc * s * d_eff / 1e3;
  double A_v = 2.0 * bar_area(rules.stirrup_diameter_mm);
  cap.V_s = A_v * mat.fy_mpa * d_eff / rules.stirrup_spacing_mm / 1e3;
  cap.V_s_max = 0.66 * sqrt_fc * s * d_eff / 1e3;
  cap.V_n = V_c + std::min(cap.V_s, cap.V_s_max);

  int per_face = rec.bars.count / 4 + 1;
  cap.S = clear_spacing(s, per_face, db, rules);
  cap.S_min = std::max(rules.min_clear_spacing_mm, db);
  return cap;
}

namespace {

struct WallGeometry {
  double l_w = 0.0;
  double b_f = 0.0;   // boundary length along the wall (each end)
  double t_f = 0.0;   // boundary thickness
  double t_w = 0.0;   // web thickness
  // Compressed area and its first moment for block depth a from one end.
  double area(double a) const {
    double bf = std::min(a, b_f);
    double web = std::clamp(a - b_f, 0.0, l_w - 2.0 * b_f);
    double far = std::clamp(a - (l_w - b_f), 0.0, b_f);
    return t_f * bf + t_w * web + t_f * far;
  }
  double first_moment(double a) const {  // about the compression end
    double bf = std::min(a, b_f);
    double web = std::clamp(a - b_f, 0.0, l_w - 2.0 * b_f);
    double far = std::clamp(a - (l_w - b_f), 0.0, b_f);
    double q = t_f * bf * bf / 2.0;
    q += t_w * web * (b_f + web / 2.0);
    q += t_f * far * ((l_w - b_f) + far / 2.0);
    return q;
  }
};

WallGeometry wall_geometry(const WallSectionRecord& rec, double l_w) {
  WallGeometry g;
  g.l_w = l_w;
  g.t_w = rec.t_w_mm;
  if (rec.has_boundary()) {
    g.b_f = rec.b_f_mm;
    g.t_f = rec.t_f_mm;
  } else {
    g.b_f = 0.0;
    g.t_f = rec.t_w_mm;
  }
  return g;
}

std::vector<SteelRow> wall_rows(const WallSectionRecord& rec,
                                const SectionRules& rules, double l_w) {
  std::vector<SteelRow> rows;
  double ab = bar_area(rec.bar_diameter_mm);
  double nb = rules.wall_boundary_bars;
  // Boundary (or hidden end-zone) bars lumped at the zone centroids.
  double end_len = rec.has_boundary() ? rec.b_f_mm : 2.0 * rules.cover_mm + 100.0;
  rows.push_back({end_len / 2.0, nb * ab});
  rows.push_back({l_w - end_len / 2.0, nb * ab});
  // Vertical web curtains of 10 mm bars at the shear-reinforcement spacing.
  double web_len = l_w - 2.0 * end_len;
  if (web_len > rec.s_sh_mm) {
    int n_web = static_cast<int>(web_len / rec.s_sh_mm);
    double a10 = bar_area(10.0) * rules.wall_curtains;
    for (int i = 1; i <= n_web; ++i)
      rows.push_back({end_len + web_len * i / (n_web + 1), a10});
  }
  return rows;
}

SectionForces wall_section_forces(const WallGeometry& g,
                                  const std::vector<SteelRow>& rows, double c,
                                  const Materials& mat) {
  SectionForces out;
  double a = std::min(mat.beta1() * c, g.l_w);
  double fc85 = 0.85 * mat.fc_prime_mpa;
  double A = g.area(a);
  double Q = g.first_moment(a);
  out.P = fc85 * A;
  out.M = fc85 * (A * g.l_w / 2.0 - Q);
  for (const auto& row : rows) {
    double fs = row_stress(row, c, mat);
    if (row.y < a && fs > 0.0) fs -= fc85;
    out.P += row.area * fs;
    out.M += row.area * fs * (g.l_w / 2.0 - row.y);
  }
  return out;
}

}  // namespace

WallSectionData derive_wall_section(const WallSectionRecord& rec,
                                    const Materials& mat,
                                    const SectionRules& rules,
                                    double l_w) {
  WallGeometry g = wall_geometry(rec, l_w);
  WallSectionData out;
  double web_clear = l_w - 2.0 * g.b_f;
  out.A_g = g.t_f * g.b_f * 2.0 + g.t_w * web_clear;
  out.I_g = g.t_w * web_clear * web_clear * web_clear / 12.0;
  if (g.b_f > 0.0) {
    double arm = l_w / 2.0 - g.b_f / 2.0;
    out.I_g += 2.0 * (g.t_f * g.b_f * g.b_f * g.b_f / 12.0 +
                      g.t_f * g.b_f * arm * arm);
  }
  out.I_eff = rules.wall_ieff_factor * out.I_g;
  for (const auto& row : wall_rows(rec, rules, l_w)) out.A_s_total += row.area;

  // In-plane shear strength: concrete term plus horizontal web steel,
  // capped at 0.66 sqrt(f'c) Acv.
  double A_cv = rec.t_w_mm * l_w;
  double rho_t = rules.wall_curtains * bar_area(10.0) /
                 (rec.t_w_mm * rec.s_sh_mm);
  double sqrt_fc = std::sqrt(mat.fc_prime_mpa);
  double vn = (0.17 * sqrt_fc + rho_t * mat.fy_mpa) * A_cv;
  vn = std::min(vn, 0.66 * sqrt_fc * A_cv);
  out.V_n = vn / 1e3;
  return out;
}

double wall_moment_capacity(const WallSectionRecord& rec, const Materials& mat,
                            const SectionRules& rules, double l_w,
                            double P_kn) {
  WallGeometry g = wall_geometry(rec, l_w);
  std::vector<SteelRow> rows = wall_rows(rec, rules, l_w);
  double P_target = P_kn * 1e3;
  double lo = 1e-6, hi = 10.0 * l_w;
  if (wall_section_forces(g, rows, hi, mat).P < P_target)
    return 0.0;  // axial demand beyond squash load
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (wall_section_forces(g, rows, mid, mat).P >= P_target)
      hi = mid;
    else
      lo = mid;
    if (hi - lo < 1e-10 * l_w) break;
  }
  SectionForces f = wall_section_forces(g, rows, 0.5 * (lo + hi), mat);
  return std::max(0.0, f.M) / 1e6;
}

WallTerms derive_wall_terms(const WallSectionRecord& rec, const Materials& mat,
                            double l_w, double P_kn, double V_kn) {
  WallTerms out;
  out.has_boundary = rec.has_boundary();
  double denom_ax = rec.t_w_mm * l_w * mat.fc_prime_mpa;
  // Symmetric reinforcement, so the (As - A's) fy term vanishes.
  out.axial_flexural = P_kn * 1e3 / denom_ax;
  out.shear = V_kn * 1e3 / (rec.t_w_mm * l_w * std::sqrt(mat.fc_prime_mpa));
  return out;
}

}  // namespace framepbo
