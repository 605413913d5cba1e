#include "framepbo/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace framepbo {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void fail(int line, const std::string& msg) {
  throw std::runtime_error("config: line " + std::to_string(line) + ": " +
                           msg);
}

double to_double(const std::string& v, int line) {
  try {
    size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    fail(line, "expected a number, got '" + v + "'");
  }
}

long long to_int(const std::string& v, int line) {
  try {
    size_t pos = 0;
    long long n = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return n;
  } catch (const std::exception&) {
    fail(line, "expected an integer, got '" + v + "'");
  }
}

std::uint64_t to_u64(const std::string& v, int line) {
  try {
    size_t pos = 0;
    unsigned long long n = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return n;
  } catch (const std::exception&) {
    fail(line, "expected a non-negative integer, got '" + v + "'");
  }
}

bool to_bool(const std::string& v, int line) {
  std::string s;
  for (char c : v) s.push_back(static_cast<char>(std::tolower(c)));
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  fail(line, "expected a boolean, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<int> to_id_list(const std::string& v, int line) {
  std::vector<int> out;
  for (const std::string& item : split_list(v))
    out.push_back(static_cast<int>(to_int(item, line)));
  return out;
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  std::set<std::string> seen;
  bool levels_set = false;

  static const std::set<std::string> kSections = {
      "run",      "abc",     "geometry", "materials",    "detailing",
      "spectrum", "pushover", "penalty", "design_space", "design"};

  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = trim(raw);
    if (s.empty() || s[0] == '#' || s[0] == ';') continue;
    if (s.front() == '[') {
      if (s.back() != ']') fail(line, "unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      if (!kSections.count(section))
        fail(line, "unknown section [" + section + "]");
      continue;
    }
    size_t eq = s.find('=');
    if (eq == std::string::npos) fail(line, "expected 'key = value'");
    std::string key = trim(s.substr(0, eq));
    std::string val = trim(s.substr(eq + 1));
    if (key.empty()) fail(line, "empty key");
    if (section.empty()) fail(line, "key '" + key + "' outside any section");
    std::string qual = section + "." + key;
    if (!seen.insert(qual).second) fail(line, "duplicate key '" + qual + "'");

    if (section == "run") {
      if (key == "case") {
        try {
          cfg.case_id = parse_case_id(val);
        } catch (const std::exception& e) {
          fail(line, e.what());
        }
      } else if (key == "levels") {
        cfg.levels.clear();
        for (const std::string& item : split_list(val)) {
          try {
            cfg.levels.push_back(parse_level(item));
          } catch (const std::exception& e) {
            fail(line, e.what());
          }
        }
        levels_set = true;
        if (cfg.levels.empty()) fail(line, "level list is empty");
      } else if (key == "output_dir") {
        cfg.output_dir = val;
      } else if (key == "seed") {
        cfg.abc.seed = to_u64(val, line);
      } else if (key == "threads") {
        cfg.abc.threads = static_cast<int>(to_int(val, line));
      } else {
        fail(line, "unknown key '" + key + "' in [run]");
      }
    } else if (section == "abc") {
      if (key == "colony_size")
        cfg.abc.colony_size = static_cast<int>(to_int(val, line));
      else if (key == "abandonment_limit")
        cfg.abc.abandonment_limit = static_cast<int>(to_int(val, line));
      else if (key == "max_iterations")
        cfg.abc.max_iterations = static_cast<int>(to_int(val, line));
      else if (key == "vcp")
        cfg.abc.vcp = to_double(val, line);
      else if (key == "runs")
        cfg.abc.runs = static_cast<int>(to_int(val, line));
      else if (key == "divergence_window")
        cfg.abc.divergence_window = to_double(val, line);
      else if (key == "abort_on_divergence")
        cfg.abc.abort_on_divergence = to_bool(val, line);
      else
        fail(line, "unknown key '" + key + "' in [abc]");
    } else if (section == "geometry") {
      if (key == "bay_width_m")
        cfg.geometry.bay_width_m = to_double(val, line);
      else if (key == "story_height_m")
        cfg.geometry.story_height_m = to_double(val, line);
      else if (key == "dead_kg_m2")
        cfg.geometry.dead_kg_m2 = to_double(val, line);
      else if (key == "live_kg_m2")
        cfg.geometry.live_kg_m2 = to_double(val, line);
      else if (key == "tributary_width_m")
        cfg.geometry.tributary_width_m = to_double(val, line);
      else if (key == "gravity_g")
        cfg.geometry.gravity_g = to_double(val, line);
      else
        fail(line, "unknown key '" + key + "' in [geometry]");
    } else if (section == "materials") {
      if (key == "fc_prime_mpa")
        cfg.materials.fc_prime_mpa = to_double(val, line);
      else if (key == "fy_mpa")
        cfg.materials.fy_mpa = to_double(val, line);
      else if (key == "ec_mpa")
        cfg.materials.ec_mpa = to_double(val, line);
      else if (key == "es_mpa")
        cfg.materials.es_mpa = to_double(val, line);
      else if (key == "rho_steel")
        cfg.materials.rho_steel = to_double(val, line);
      else if (key == "rho_concrete")
        cfg.materials.rho_concrete = to_double(val, line);
      else if (key == "phi_flexure")
        cfg.materials.phi_flexure = to_double(val, line);
      else if (key == "phi_compression")
        cfg.materials.phi_compression = to_double(val, line);
      else if (key == "phi_shear")
        cfg.materials.phi_shear = to_double(val, line);
      else
        fail(line, "unknown key '" + key + "' in [materials]");
    } else if (section == "detailing") {
      if (key == "cover_mm")
        cfg.rules.cover_mm = to_double(val, line);
      else if (key == "stirrup_diameter_mm")
        cfg.rules.stirrup_diameter_mm = to_double(val, line);
      else if (key == "stirrup_spacing_mm")
        cfg.rules.stirrup_spacing_mm = to_double(val, line);
      else if (key == "min_clear_spacing_mm")
        cfg.rules.min_clear_spacing_mm = to_double(val, line);
      else if (key == "beam_ieff_factor")
        cfg.rules.beam_ieff_factor = to_double(val, line);
      else if (key == "column_ieff_factor")
        cfg.rules.column_ieff_factor = to_double(val, line);
      else if (key == "wall_ieff_factor")
        cfg.rules.wall_ieff_factor = to_double(val, line);
      else if (key == "interaction_points")
        cfg.rules.interaction_points = static_cast<int>(to_int(val, line));
      else if (key == "wall_boundary_bars")
        cfg.rules.wall_boundary_bars = static_cast<int>(to_int(val, line));
      else if (key == "wall_curtains")
        cfg.rules.wall_curtains = static_cast<int>(to_int(val, line));
      else
        fail(line, "unknown key '" + key + "' in [detailing]");
    } else if (section == "spectrum") {
      if (key == "S_a")
        cfg.evaluator.spectrum.S_a = to_double(val, line);
      else if (key == "S_a_IO")
        cfg.evaluator.spectrum.sa_by_level[PerformanceLevel::IO] =
            to_double(val, line);
      else if (key == "S_a_LS")
        cfg.evaluator.spectrum.sa_by_level[PerformanceLevel::LS] =
            to_double(val, line);
      else if (key == "S_a_CP")
        cfg.evaluator.spectrum.sa_by_level[PerformanceLevel::CP] =
            to_double(val, line);
      else if (key == "base_shear_coeff")
        cfg.evaluator.spectrum.base_shear_coeff = to_double(val, line);
      else if (key == "C1")
        cfg.evaluator.spectrum.C1 = to_double(val, line);
      else if (key == "C2")
        cfg.evaluator.spectrum.C2 = to_double(val, line);
      else if (key == "C3")
        cfg.evaluator.spectrum.C3 = to_double(val, line);
      else if (key == "C0")
        cfg.evaluator.spectrum.c0_override = to_double(val, line);
      else
        fail(line, "unknown key '" + key + "' in [spectrum]");
    } else if (section == "pushover") {
      if (key == "target_drift_fraction")
        cfg.evaluator.push.target_drift_fraction = to_double(val, line);
      else if (key == "steps")
        cfg.evaluator.push.steps = static_cast<int>(to_int(val, line));
      else if (key == "pdelta")
        cfg.evaluator.push.pdelta = to_bool(val, line);
      else
        fail(line, "unknown key '" + key + "' in [pushover]");
    } else if (section == "penalty") {
      if (key == "K")
        cfg.evaluator.penalty.K = to_double(val, line);
      else if (key == "eps")
        cfg.evaluator.penalty.eps = to_double(val, line);
      else if (key == "elastic_drift_limit")
        cfg.evaluator.perf.elastic_drift_limit = to_double(val, line);
      else if (key == "unreached_violation")
        cfg.evaluator.perf.unreached_violation = to_double(val, line);
      else
        fail(line, "unknown key '" + key + "' in [penalty]");
    } else if (section == "design_space") {
      if (key == "group_mode") {
        if (val == "per_story")
          cfg.group_mode = GroupMode::per_story;
        else if (val == "single")
          cfg.group_mode = GroupMode::single;
        else
          fail(line, "group_mode must be 'per_story' or 'single'");
      } else if (key == "beam_id_min")
        cfg.beam_ids.lo = static_cast<int>(to_int(val, line));
      else if (key == "beam_id_max")
        cfg.beam_ids.hi = static_cast<int>(to_int(val, line));
      else if (key == "column_id_min")
        cfg.column_ids.lo = static_cast<int>(to_int(val, line));
      else if (key == "column_id_max")
        cfg.column_ids.hi = static_cast<int>(to_int(val, line));
      else if (key == "wall_id_min")
        cfg.wall_ids.lo = static_cast<int>(to_int(val, line));
      else if (key == "wall_id_max")
        cfg.wall_ids.hi = static_cast<int>(to_int(val, line));
      else
        fail(line, "unknown key '" + key + "' in [design_space]");
    } else if (section == "design") {
      if (key == "beams") {
        cfg.design.beam_group_ids = to_id_list(val, line);
        cfg.has_design = true;
      } else if (key == "columns") {
        cfg.design.column_group_ids = to_id_list(val, line);
        cfg.has_design = true;
      } else if (key == "walls") {
        cfg.design.wall_group_ids = to_id_list(val, line);
        cfg.has_design = true;
      } else {
        fail(line, "unknown key '" + key + "' in [design]");
      }
    }
  }

  if (levels_set && cfg.levels.empty())
    throw std::runtime_error("config: level list is empty");
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

void RunConfig::validate() const {
  if (levels.empty())
    throw std::runtime_error("config: at least one performance level");
  if (output_dir.empty())
    throw std::runtime_error("config: output_dir is empty");

  if (abc.colony_size < 2 || abc.colony_size % 2 != 0)
    throw std::runtime_error("config: colony_size must be an even number >= 2");
  if (abc.abandonment_limit < 1)
    throw std::runtime_error("config: abandonment_limit must be >= 1");
  if (abc.max_iterations < 0)
    throw std::runtime_error("config: max_iterations must be >= 0");
  if (!(abc.vcp > 0.0) || abc.vcp > 1.0)
    throw std::runtime_error("config: vcp must lie in (0, 1]");
  if (abc.runs < 1) throw std::runtime_error("config: runs must be >= 1");
  if (!(abc.divergence_window > 0.0) || abc.divergence_window > 1.0)
    throw std::runtime_error("config: divergence_window must lie in (0, 1]");
  if (abc.threads < 1)
    throw std::runtime_error("config: threads must be >= 1");

  if (!(geometry.bay_width_m > 0.0) || !(geometry.story_height_m > 0.0) ||
      !(geometry.tributary_width_m > 0.0) || !(geometry.gravity_g > 0.0) ||
      geometry.dead_kg_m2 < 0.0 || geometry.live_kg_m2 < 0.0)
    throw std::runtime_error("config: geometry values out of range");
  materials.validate();

  const SpectrumConfig& sp = evaluator.spectrum;
  if (!(sp.S_a > 0.0) || !(sp.base_shear_coeff > 0.0) || !(sp.C1 > 0.0) ||
      !(sp.C2 > 0.0) || !(sp.C3 > 0.0) || sp.c0_override < 0.0)
    throw std::runtime_error("config: spectrum values out of range");
  for (const auto& [level, sa] : sp.sa_by_level)
    if (!(sa > 0.0))
      throw std::runtime_error("config: per-level S_a must be positive");

  if (!(evaluator.push.target_drift_fraction > 0.0) ||
      evaluator.push.steps < 1)
    throw std::runtime_error("config: pushover values out of range");
  if (!(evaluator.penalty.K > 0.0) || !(evaluator.penalty.eps > 0.0))
    throw std::runtime_error("config: penalty values out of range");
  if (!(evaluator.perf.elastic_drift_limit > 0.0) ||
      !(evaluator.perf.unreached_violation > 0.0))
    throw std::runtime_error("config: limit values out of range");

  for (const IdRange* r : {&beam_ids, &column_ids, &wall_ids}) {
    if (r->lo < 1 || r->hi < 0 || (r->hi != 0 && r->hi < r->lo))
      throw std::runtime_error("config: section id range out of order");
  }
  if (has_design) {
    for (const std::vector<int>* ids :
         {&design.beam_group_ids, &design.column_group_ids,
          &design.wall_group_ids})
      for (int id : *ids)
        if (id < 1)
          throw std::runtime_error("config: design ids must be >= 1");
  }
}

std::vector<std::string> preset_names() {
  return {"paper-io", "paper-ls", "paper-cp", "desk"};
}

void apply_preset(RunConfig& config, const std::string& name) {
  if (name == "paper-io") {
    config.levels = {PerformanceLevel::IO};
    config.abc.colony_size = 30;
    config.abc.max_iterations = 105;
  } else if (name == "paper-ls") {
    config.levels = {PerformanceLevel::LS};
    config.abc.colony_size = 30;
    config.abc.max_iterations = 140;
  } else if (name == "paper-cp") {
    config.levels = {PerformanceLevel::CP};
    config.abc.colony_size = 30;
    config.abc.max_iterations = 140;
  } else if (name == "desk") {
    config.abc.colony_size = 20;
    config.abc.max_iterations = 40;
    config.abc.runs = 1;
    // Feasible designs are rare early on; only call a desk run diverged if
    // none has appeared by the end.
    config.abc.divergence_window = 1.0;
  } else {
    throw std::runtime_error("unknown preset '" + name +
                             "' (want paper-io, paper-ls, paper-cp, or desk)");
  }
}

std::string describe_preset(const std::string& name) {
  if (name == "paper-io")
    return "immediate-occupancy runs: colony 30, 105 iterations";
  if (name == "paper-ls")
    return "life-safety runs: colony 30, 140 iterations";
  if (name == "paper-cp")
    return "collapse-prevention runs: colony 30, 140 iterations";
  if (name == "desk")
    return "quick desk-scale runs: colony 20, 40 iterations, single run";
  throw std::runtime_error("unknown preset '" + name + "'");
}

std::string format_levels(const std::vector<PerformanceLevel>& levels) {
  std::string out;
  for (size_t i = 0; i < levels.size(); ++i) {
    if (i) out += ",";
    out += level_name(levels[i]);
  }
  return out;
}

}  // namespace framepbo
