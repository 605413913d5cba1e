#include "framepbo/app.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>

#include <json.hpp>

#include "framepbo/report.hpp"

namespace framepbo {

namespace fs = std::filesystem;

namespace {

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(c));
  return s;
}

std::string level_suffix(PerformanceLevel level) {
  return lower(level_name(level));
}

// Plot titles derive from the CSV stem alone, so a re-render from the files
// reproduces the original SVG bytes.
std::string title_for(const std::string& stem) {
  std::string kind = stem;
  std::string level;
  size_t us = stem.rfind('_');
  if (us != std::string::npos) {
    std::string suf = stem.substr(us + 1);
    if (suf == "io" || suf == "ls" || suf == "cp") {
      kind = stem.substr(0, us);
      for (char c : suf) level.push_back(static_cast<char>(std::toupper(c)));
    }
  }
  std::string base = kind == "convergence"  ? "convergence"
                     : kind == "capacity"   ? "capacity curve"
                     : kind == "drift"      ? "story drift"
                                            : kind;
  return level.empty() ? base : base + " (" + level + ")";
}

struct Inputs {
  SectionCatalogs catalogs;
  AllowableTables tables;
};

Inputs load_inputs(const std::string& data_dir) {
  Inputs in;
  in.catalogs = load_catalogs(data_dir);
  in.tables = load_allowables(data_dir + "/allowables.csv");
  return in;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec)
    throw std::runtime_error("cannot create output directory '" + dir +
                             "': " + ec.message());
}

// Wall-clock data lives only here so every other artifact is reproducible.
void write_meta(const std::string& dir, const std::string& command,
                const RunConfig& cfg, double duration_s) {
  nlohmann::json meta;
  meta["tool"] = "framepbo";
  meta["command"] = command;
  meta["case"] = case_name(cfg.case_id);
  meta["levels"] = format_levels(cfg.levels);
  meta["threads"] = cfg.abc.threads;
  meta["duration_s"] = duration_s;
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  meta["created_utc"] = buf;
  std::ofstream out(dir + "/meta.json", std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + dir + "/meta.json'");
  out << meta.dump(2) << "\n";
}

int clamp_hi(const IdRange& range, int catalog_size, const char* what) {
  int hi = range.hi == 0 ? catalog_size : range.hi;
  if (hi > catalog_size)
    throw std::runtime_error(std::string("config: ") + what +
                             " id range exceeds the catalog (" +
                             std::to_string(catalog_size) + " sections)");
  if (range.lo > hi)
    throw std::runtime_error(std::string("config: ") + what +
                             " id range is empty");
  return hi;
}

// Dimension split and bounds for the optimizer given the grouping mode and
// catalog ranges.
void setup_abc_space(const RunConfig& cfg, const FrameModel& model,
                     const SectionCatalogs& catalogs, ABCConfig& abc) {
  int beam_hi = clamp_hi(cfg.beam_ids, catalogs.beams.size(), "beam");
  int col_hi = clamp_hi(cfg.column_ids, catalogs.columns.size(), "column");
  int wall_hi = clamp_hi(cfg.wall_ids, catalogs.walls.size(), "wall");

  bool single = cfg.group_mode == GroupMode::single;
  abc.beam_dims = single ? 1 : model.beam_group_count();
  abc.column_dims = single ? 1 : model.column_group_count();
  int wall_groups = model.wall_group_count();
  abc.wall_dims = wall_groups == 0 ? 0 : (single ? 1 : wall_groups);

  abc.bounds.clear();
  for (int k = 0; k < abc.beam_dims; ++k)
    abc.bounds.push_back(
        {static_cast<double>(cfg.beam_ids.lo), static_cast<double>(beam_hi)});
  for (int k = 0; k < abc.column_dims; ++k)
    abc.bounds.push_back(
        {static_cast<double>(cfg.column_ids.lo), static_cast<double>(col_hi)});
  for (int k = 0; k < abc.wall_dims; ++k)
    abc.bounds.push_back(
        {static_cast<double>(cfg.wall_ids.lo), static_cast<double>(wall_hi)});
}

// Expands a one-id-per-kind vector to the per-story grouping the frame uses.
DesignVector broadcast_design(const DesignVector& d, const FrameModel& model) {
  DesignVector out;
  auto expand = [](const std::vector<int>& ids, int want) {
    if (static_cast<int>(ids.size()) == want)
      return ids;
    if (ids.size() == 1) return std::vector<int>(static_cast<size_t>(want),
                                                 ids.front());
    throw std::runtime_error("design does not match the frame grouping");
  };
  out.beam_group_ids = expand(d.beam_group_ids, model.beam_group_count());
  out.column_group_ids =
      expand(d.column_group_ids, model.column_group_count());
  int wg = model.wall_group_count();
  out.wall_group_ids =
      wg == 0 ? std::vector<int>{} : expand(d.wall_group_ids, wg);
  return out;
}

std::vector<double> drift_at_target(const LevelOutcome& lv, int n_stories) {
  if (lv.reached && !lv.state.drift.empty()) return lv.state.drift;
  return std::vector<double>(static_cast<size_t>(n_stories), 0.0);
}

void write_drift_csv(const std::string& path, const std::vector<double>& drift,
                     double limit) {
  CsvTable t;
  t.header = {"story", "drift", "limit"};
  for (size_t s = 0; s < drift.size(); ++s)
    t.rows.push_back({std::to_string(s + 1), format_double(drift[s]),
                      format_double(limit)});
  write_csv(path, t);
}

void write_levels_csv(const std::string& path,
                      const std::vector<LevelArtifacts>& levels) {
  CsvTable t;
  t.header = {"level",  "delta_t_m", "reached", "T_i_s",
              "T_e_s",  "V_y_kn",    "u_y_m",   "weight_kg",
              "C",      "phi"};
  for (const LevelArtifacts& lv : levels)
    t.rows.push_back({level_name(lv.level), format_double(lv.delta_t_m),
                      lv.reached ? "1" : "0", format_double(lv.T_i_s),
                      format_double(lv.T_e_s), format_double(lv.fit.V_y),
                      format_double(lv.fit.u_y), format_double(lv.report.F),
                      format_double(lv.report.C),
                      format_double(lv.report.phi)});
  write_csv(path, t);
}

std::vector<PlotMarker> target_markers(const std::vector<LevelArtifacts>& levels) {
  std::vector<PlotMarker> markers;
  for (const LevelArtifacts& lv : levels)
    if (lv.reached)
      markers.push_back(
          {lv.delta_t_m, "delta_t " + level_name(lv.level), true});
  return markers;
}

}  // namespace

std::string resolve_data_dir(const AppOptions& options) {
  if (!options.data_dir.empty()) return options.data_dir;
  if (const char* env = std::getenv("FRAME_PBO_DATA"); env && *env)
    return env;
  return "data";
}

RunConfig resolve_config(const AppOptions& options) {
  RunConfig cfg;
  if (!options.config_path.empty()) cfg = load_config(options.config_path);
  if (!options.preset.empty()) apply_preset(cfg, options.preset);
  if (options.has_seed) cfg.abc.seed = options.seed;
  if (options.threads > 0) cfg.abc.threads = options.threads;
  if (!options.out_dir.empty()) cfg.output_dir = options.out_dir;
  cfg.validate();
  return cfg;
}

int cmd_validate(const AppOptions& options, std::ostream& log) {
  std::string dir = resolve_data_dir(options);
  try {
    Inputs in = load_inputs(dir);
    log << "catalogs: " << in.catalogs.beams.size() << " beams, "
        << in.catalogs.columns.size() << " columns, "
        << in.catalogs.walls.size() << " walls\n";
    log << "allowables: " << in.tables.rows.size()
        << " rotation rows, drift limits " << format_double(in.tables.drift[0])
        << "/" << format_double(in.tables.drift[1]) << "/"
        << format_double(in.tables.drift[2]) << "\n";
    int warnings = 0;
    for (const std::string& w : in.catalogs.beams.warnings) {
      log << "warning (beams): " << w << "\n";
      ++warnings;
    }
    for (const std::string& w : in.catalogs.columns.warnings) {
      log << "warning (columns): " << w << "\n";
      ++warnings;
    }
    for (const std::string& w : in.catalogs.walls.warnings) {
      log << "warning (walls): " << w << "\n";
      ++warnings;
    }
    for (const std::string& w : in.tables.warnings) {
      log << "warning (allowables): " << w << "\n";
      ++warnings;
    }
    // Config file syntax/range checks ride along when one was given.
    if (!options.config_path.empty() || !options.preset.empty())
      resolve_config(options);
    log << "validation passed (" << warnings << " warning"
        << (warnings == 1 ? "" : "s") << ")\n";
    return kExitOk;
  } catch (const std::exception& e) {
    log << "validation failed: " << e.what() << "\n";
    return kExitValidation;
  }
}

int cmd_analyze(const AppOptions& options, std::ostream& log) {
  RunConfig cfg;
  Inputs in;
  try {
    cfg = resolve_config(options);
    in = load_inputs(resolve_data_dir(options));
    if (!cfg.has_design)
      throw std::runtime_error(
          "config: analyze needs a [design] section with beams/columns/walls");
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kExitValidation;
  }

  auto t0 = std::chrono::steady_clock::now();
  try {
    FrameModel model = build_case(cfg.case_id, cfg.geometry);
    EvaluatorConfig ec = cfg.evaluator;
    ec.levels = cfg.levels;
    DesignEvaluator evaluator(model, in.catalogs, in.tables, cfg.materials,
                              cfg.rules, ec);
    DesignVector design = broadcast_design(cfg.design, model);
    EvalDetail detail = evaluator.evaluate(design);

    ensure_dir(cfg.output_dir);
    const std::string& dir = cfg.output_dir;

    write_trace_csv(dir + "/capacity.csv", detail.trace);
    std::ofstream ptxt(dir + "/penalty.txt", std::ios::binary);
    if (!ptxt) throw std::runtime_error("cannot write penalty.txt");
    ptxt << format_penalty_text(detail.report);
    ptxt.close();

    std::vector<LevelArtifacts> levels;
    for (const LevelOutcome& lv : detail.levels) {
      LevelArtifacts art;
      art.level = lv.level;
      art.best = design;
      art.report = detail.report;
      art.delta_t_m = lv.delta_t;
      art.reached = lv.reached;
      art.drift = drift_at_target(lv, model.n_stories);
      art.drift_limit = in.tables.drift_limit(lv.level);
      art.T_i_s = detail.T_i;
      art.T_e_s = detail.T_e;
      art.fit = detail.fit;
      levels.push_back(art);
      std::string suffix = level_suffix(lv.level);
      write_drift_csv(dir + "/drift_" + suffix + ".csv", art.drift,
                      art.drift_limit);
      write_svg_plot(dir + "/drift_" + suffix + ".svg",
                     drift_plot(read_csv(dir + "/drift_" + suffix + ".csv"),
                                title_for("drift_" + suffix)));
    }
    write_levels_csv(dir + "/levels.csv", levels);
    write_svg_plot(dir + "/capacity.svg",
                   capacity_plot(read_csv(dir + "/capacity.csv"),
                                 title_for("capacity"),
                                 target_markers(levels)));

    double dt = std::chrono::duration<double>(std::chrono::steady_clock::now()
                                              - t0).count();
    write_meta(dir, "analyze", cfg, dt);

    log << "weight_kg: " << format_double(detail.report.F) << "\n"
        << "C: " << format_double(detail.report.C) << "\n"
        << "phi: " << format_double(detail.report.phi) << "\n"
        << "feasible: " << (detail.report.C == 0.0 ? "yes" : "no") << "\n"
        << "pushover termination: " << detail.trace.termination << "\n"
        << "artifacts in " << dir << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    log << "analysis error: " << e.what() << "\n";
    std::string msg = e.what();
    return msg.find("cannot write") != std::string::npos ||
                   msg.find("cannot create") != std::string::npos
               ? kExitIo
               : kExitValidation;
  }
}

int cmd_optimize(const AppOptions& options, std::ostream& log) {
  RunConfig cfg;
  Inputs in;
  try {
    cfg = resolve_config(options);
    in = load_inputs(resolve_data_dir(options));
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kExitValidation;
  }

  auto t0 = std::chrono::steady_clock::now();
  try {
    FrameModel model = build_case(cfg.case_id, cfg.geometry);
    ensure_dir(cfg.output_dir);
    const std::string& dir = cfg.output_dir;

    CaseArtifacts artifacts;
    artifacts.case_name = case_name(cfg.case_id);
    artifacts.seed = cfg.abc.seed;
    artifacts.colony_size = cfg.abc.colony_size;
    artifacts.max_iterations = cfg.abc.max_iterations;
    artifacts.runs = cfg.abc.runs;

    bool all_feasible = true;
    bool any_divergence_abort = false;

    for (PerformanceLevel level : cfg.levels) {
      EvaluatorConfig ec = cfg.evaluator;
      ec.levels = {level};
      DesignEvaluator evaluator(model, in.catalogs, in.tables, cfg.materials,
                                cfg.rules, ec);
      ABCConfig abc = cfg.abc;
      setup_abc_space(cfg, model, in.catalogs, abc);
      auto objective = [&](const DesignVector& d) {
        return evaluator(broadcast_design(d, model));
      };

      log << "optimizing " << level_name(level) << " (dimension "
          << abc.dimension() << ", colony " << abc.colony_size << ", "
          << abc.max_iterations << " iterations, " << abc.runs << " run"
          << (abc.runs == 1 ? "" : "s") << ")\n";
      MultiRunResult multi = run_abc_multi(abc, objective);
      const RunResult& best = multi.best();
      if (best.diverged && abc.abort_on_divergence) any_divergence_abort = true;

      DesignVector best_design = broadcast_design(best.best_design, model);
      EvalDetail detail = evaluator.evaluate(best_design);

      LevelArtifacts art;
      art.level = level;
      art.best = best_design;
      art.report = detail.report;
      art.T_i_s = detail.T_i;
      art.T_e_s = detail.T_e;
      art.fit = detail.fit;
      art.seed = best.seed;
      art.runs = abc.runs;
      art.mean_phi = multi.mean_phi;
      art.stddev_phi = multi.stddev_phi;
      art.diverged = best.diverged;
      for (const RunResult& r : multi.runs) art.evaluations += r.evaluations;
      if (!detail.levels.empty()) {
        const LevelOutcome& lv = detail.levels.front();
        art.delta_t_m = lv.delta_t;
        art.reached = lv.reached;
        art.drift = drift_at_target(lv, model.n_stories);
      }
      art.drift_limit = in.tables.drift_limit(level);

      std::string suffix = level_suffix(level);
      std::string conv_csv = "convergence_" + suffix + ".csv";
      std::string cap_csv = "capacity_" + suffix + ".csv";
      std::string drift_csv = "drift_" + suffix + ".csv";
      write_history_csv(dir + "/" + conv_csv, best);
      write_trace_csv(dir + "/" + cap_csv, detail.trace);
      write_drift_csv(dir + "/" + drift_csv, art.drift, art.drift_limit);
      write_svg_plot(dir + "/convergence_" + suffix + ".svg",
                     convergence_plot(read_csv(dir + "/" + conv_csv),
                                      title_for("convergence_" + suffix)));
      std::vector<PlotMarker> markers;
      if (art.reached)
        markers.push_back({art.delta_t_m, "delta_t", true});
      write_svg_plot(dir + "/capacity_" + suffix + ".svg",
                     capacity_plot(read_csv(dir + "/" + cap_csv),
                                   title_for("capacity_" + suffix), markers));
      write_svg_plot(dir + "/drift_" + suffix + ".svg",
                     drift_plot(read_csv(dir + "/" + drift_csv),
                                title_for("drift_" + suffix)));
      art.files = {conv_csv,
                   cap_csv,
                   drift_csv,
                   "convergence_" + suffix + ".svg",
                   "capacity_" + suffix + ".svg",
                   "drift_" + suffix + ".svg"};
      artifacts.levels.push_back(art);

      if (detail.report.C != 0.0) all_feasible = false;
      log << "  best weight_kg " << format_double(detail.report.F) << ", C "
          << format_double(detail.report.C) << ", evaluations "
          << art.evaluations << (best.diverged ? ", diverged" : "") << "\n";
    }

    write_levels_csv(dir + "/levels.csv", artifacts.levels);
    std::ofstream rep(dir + "/case_report.txt", std::ios::binary);
    if (!rep) throw std::runtime_error("cannot write case_report.txt");
    rep << format_case_report(artifacts);
    rep.close();

    double dt = std::chrono::duration<double>(std::chrono::steady_clock::now()
                                              - t0).count();
    write_meta(dir, "optimize", cfg, dt);
    log << "artifacts in " << dir << "\n";

    if (any_divergence_abort) return kExitDivergence;
    return all_feasible ? kExitOk : kExitInfeasible;
  } catch (const EvaluationError& e) {
    log << "evaluation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    log << "optimize error: " << e.what() << "\n";
    std::string msg = e.what();
    return msg.find("cannot write") != std::string::npos ||
                   msg.find("cannot create") != std::string::npos
               ? kExitIo
               : kExitValidation;
  }
}

int cmd_report(const AppOptions& options, std::ostream& log) {
  std::string dir = options.out_dir;
  if (dir.empty()) {
    try {
      dir = resolve_config(options).output_dir;
    } catch (const std::exception& e) {
      log << "error: " << e.what() << "\n";
      return kExitValidation;
    }
  }
  if (!fs::is_directory(dir)) {
    log << "error: '" << dir << "' is not a directory\n";
    return kExitIo;
  }
  try {
    // Target markers for capacity plots, when the summary file is present.
    std::vector<PlotMarker> all_markers;
    std::map<std::string, PlotMarker> marker_by_suffix;
    if (fs::exists(dir + "/levels.csv")) {
      CsvTable t = read_csv(dir + "/levels.csv");
      for (const auto& row : t.rows) {
        std::string level = t.cell(&row - &t.rows[0], "level");
        double delta = std::stod(t.cell(&row - &t.rows[0], "delta_t_m"));
        bool reached = t.cell(&row - &t.rows[0], "reached") == "1";
        if (!reached) continue;
        all_markers.push_back({delta, "delta_t " + level, true});
        marker_by_suffix[lower(level)] = {delta, "delta_t", true};
      }
    }

    int rendered = 0;
    std::vector<fs::path> entries;
    for (const auto& entry : fs::directory_iterator(dir))
      if (entry.path().extension() == ".csv") entries.push_back(entry.path());
    std::sort(entries.begin(), entries.end());
    for (const fs::path& p : entries) {
      std::string stem = p.stem().string();
      std::string svg = (p.parent_path() / (stem + ".svg")).string();
      if (stem.rfind("convergence", 0) == 0) {
        write_svg_plot(svg, convergence_plot(read_csv(p.string()),
                                             title_for(stem)));
      } else if (stem.rfind("capacity", 0) == 0) {
        std::vector<PlotMarker> markers;
        size_t us = stem.rfind('_');
        if (us != std::string::npos &&
            marker_by_suffix.count(stem.substr(us + 1)))
          markers.push_back(marker_by_suffix[stem.substr(us + 1)]);
        else if (stem == "capacity")
          markers = all_markers;
        write_svg_plot(svg, capacity_plot(read_csv(p.string()),
                                          title_for(stem), markers));
      } else if (stem.rfind("drift", 0) == 0) {
        write_svg_plot(svg, drift_plot(read_csv(p.string()),
                                       title_for(stem)));
      } else {
        continue;
      }
      log << "rendered " << svg << "\n";
      ++rendered;
    }
    log << rendered << " plot" << (rendered == 1 ? "" : "s")
        << " rendered\n";
    return kExitOk;
  } catch (const std::exception& e) {
    log << "report error: " << e.what() << "\n";
    return kExitIo;
  }
}

}  // namespace framepbo
