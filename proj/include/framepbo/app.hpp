#pragma once

#include <cstdint>
#include <ostream>
#include <string>

#include "framepbo/config.hpp"

namespace framepbo {

// Stable exit-code contract shared by every subcommand.
constexpr int kExitOk = 0;
constexpr int kExitInfeasible = 1;   // optimize finished, some level has C > 0
constexpr int kExitValidation = 2;   // bad config, catalog, or design input
constexpr int kExitDivergence = 3;   // diverged under abort_on_divergence
constexpr int kExitIo = 4;           // unreadable/unwritable files

struct AppOptions {
  std::string config_path;  // empty: built-in defaults
  std::string preset;       // empty: none
  std::string out_dir;      // overrides the config's output_dir
  std::string data_dir;     // catalog directory (flag > FRAME_PBO_DATA > "data")
  bool has_seed = false;
  std::uint64_t seed = 0;
  int threads = 0;          // 0: keep the config value
};

// Config file, then preset, then explicit flag overrides; throws on errors.
RunConfig resolve_config(const AppOptions& options);

// Catalog directory resolution (options.data_dir > FRAME_PBO_DATA > "data").
std::string resolve_data_dir(const AppOptions& options);

// Subcommands return process exit codes and log human-readable progress.
int cmd_validate(const AppOptions& options, std::ostream& log);
int cmd_analyze(const AppOptions& options, std::ostream& log);
int cmd_optimize(const AppOptions& options, std::ostream& log);
int cmd_report(const AppOptions& options, std::ostream& log);

}  // namespace framepbo
