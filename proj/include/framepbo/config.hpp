#pragma once

#include <string>
#include <vector>

#include "framepbo/abc.hpp"
#include "framepbo/evaluator.hpp"
#include "framepbo/frame.hpp"
#include "framepbo/sections.hpp"

namespace framepbo {

// How catalog ids map onto optimization variables.
enum class GroupMode {
  per_story,  // one id per story and member kind (default)
  single      // one id per member kind, shared by every story
};

// Limits the catalog range available to the optimizer for one member kind.
// Zero for hi means "the full catalog".
struct IdRange {
  int lo = 1;
  int hi = 0;
};

// One fully parsed run configuration. A single file determines the whole
// run; command-line flags may override seed, threads, and output_dir.
struct RunConfig {
  CaseId case_id = CaseId::story4;
  std::vector<PerformanceLevel> levels = {PerformanceLevel::IO,
                                          PerformanceLevel::LS,
                                          PerformanceLevel::CP};
  std::string output_dir = "out";

  ABCConfig abc;  // dimension split and bounds are filled at run time
  GeometryConfig geometry;
  Materials materials;
  SectionRules rules;
  EvaluatorConfig evaluator;

  GroupMode group_mode = GroupMode::per_story;
  IdRange beam_ids;
  IdRange column_ids;
  IdRange wall_ids;

  // Optional explicit design, used by the analyze command.
  DesignVector design;
  bool has_design = false;

  void validate() const;  // field-level checks (cross-catalog checks at use)
};

// Parses sectioned "key = value" text. Full-line comments start with '#' or
// ';'. Unknown sections or keys, duplicate keys, malformed values, and an
// empty level list are all errors.
RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);

// Named parameter bundles; applying one overwrites the fields it covers.
std::vector<std::string> preset_names();
void apply_preset(RunConfig& config, const std::string& name);
std::string describe_preset(const std::string& name);

// Levels formatted back as "IO,LS,CP".
std::string format_levels(const std::vector<PerformanceLevel>& levels);

}  // namespace framepbo
