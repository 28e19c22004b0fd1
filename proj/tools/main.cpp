#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "vifp/config.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Projected iteration harness for joint fixed-point / variational-inequality "
               "problems"};
  app.require_subcommand(1);

  std::string config_path;
  vifp::CliOverrides over;
  std::string output_dir;
  std::uint64_t seed = 0;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("config", config_path, "experiment config file (JSON)")->required();
    cmd->add_option("--output-dir", output_dir, "override the config's output directory");
    cmd->add_option("--seed", seed, "override the config's generator seed");
    cmd->add_flag("--quiet", over.quiet, "suppress progress output");
  };

  CLI::App* run = app.add_subcommand("run", "run every scheme of the experiment");
  add_common(run);
  CLI::App* validate = app.add_subcommand("validate", "parse and certify without iterating");
  add_common(validate);

  CLI11_PARSE(app, argc, argv);

  if (run->count("--output-dir") || validate->count("--output-dir")) over.output_dir = output_dir;
  if (run->count("--seed") || validate->count("--seed")) over.seed = seed;

  if (app.got_subcommand(run)) {
    return vifp::run_experiment(config_path, over);
  }

  const vifp::ValidationReport report = vifp::validate_config(config_path, over);
  for (const auto& line : report.lines) std::printf("%s\n", line.c_str());
  return report.ok ? 0 : 1;
}
