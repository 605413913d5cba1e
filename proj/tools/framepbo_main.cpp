#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "framepbo/app.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "framepbo — performance-based sizing of reinforced-concrete frames\n"
      "Catalog directory: FRAME_PBO_DATA environment variable, default "
      "'data'."};
  app.require_subcommand(1);

  framepbo::AppOptions options;
  std::string preset_help = "Named parameter bundle (";
  for (const std::string& name : framepbo::preset_names())
    preset_help += name + ": " + framepbo::describe_preset(name) + "; ";
  preset_help.pop_back();
  preset_help.back() = ')';

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", options.config_path,
                    "Run configuration file (sectioned key = value text)");
    sub->add_option("--seed", options.seed, "Override the base random seed")
        ->each([&](const std::string&) { options.has_seed = true; });
    sub->add_option("--out", options.out_dir, "Override the output directory");
    sub->add_option("--threads", options.threads,
                    "Evaluation worker threads (0 keeps the config value)");
    sub->add_option("--data", options.data_dir,
                    "Section catalog directory (overrides FRAME_PBO_DATA)");
    sub->add_option("--preset", options.preset, preset_help);
  };

  CLI::App* validate = app.add_subcommand(
      "validate", "Check the section catalogs, allowable tables, and config");
  add_common(validate);
  CLI::App* analyze = app.add_subcommand(
      "analyze", "Evaluate one explicit design and write its artifacts");
  add_common(analyze);
  CLI::App* optimize = app.add_subcommand(
      "optimize", "Search the catalogs for the lightest feasible design");
  add_common(optimize);
  CLI::App* report = app.add_subcommand(
      "report", "Re-render SVG plots from CSV artifacts in the output dir");
  add_common(report);

  CLI11_PARSE(app, argc, argv);

  if (validate->parsed()) return framepbo::cmd_validate(options, std::cout);
  if (analyze->parsed()) return framepbo::cmd_analyze(options, std::cout);
  if (optimize->parsed()) return framepbo::cmd_optimize(options, std::cout);
  if (report->parsed()) return framepbo::cmd_report(options, std::cout);
  return framepbo::kExitValidation;
}
