// jflow: command-line driver for J-flow experiments on flat complex 2-tori.
//
//   jflow run      --config PATH [--output DIR] [--snapshot-every K] [--workers N] [--quiet]
//   jflow critical --config PATH [--output DIR] [--workers N] [--quiet]
//   jflow compare  DIR_A DIR_B [--threshold T]
//   jflow validate --config PATH
//
// Exit statuses: 0 ok, 1 usage, 2 validation, 3 hypothesis violation,
// 4 numerical failure, 5 non-convergence.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

#include "jflow/commands.hpp"
#include "jflow/error.hpp"

int main(int argc, char** argv) {
  CLI::App app{"J-flow laboratory on flat Kahler surfaces"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output;
  int workers = 0;
  int snapshot_every = -1;
  bool quiet = false;
  double threshold = 1e-5;
  std::string dir_a, dir_b;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "experiment config (YAML)")->required();
    sub->add_option("--output", output, "output directory (overrides output_dir)");
    sub->add_option("--workers", workers, "data-parallel width (env JFLOW_WORKERS)");
    sub->add_flag("--quiet", quiet, "suppress progress output");
  };

  auto* run = app.add_subcommand("run", "integrate the J-flow and monitor its estimates");
  add_common(run);
  run->add_option("--snapshot-every", snapshot_every, "write phi snapshots every K steps");

  auto* critical = app.add_subcommand("critical", "solve the Monge-Ampere reduction by Newton");
  add_common(critical);

  auto* compare = app.add_subcommand("compare", "compare the chi snapshots of two runs");
  compare->add_option("a", dir_a, "first run directory or .jfld file")->required();
  compare->add_option("b", dir_b, "second run directory or .jfld file")->required();
  compare->add_option("--threshold", threshold, "pass threshold on the sup entry difference");
  compare->add_flag("--quiet", quiet);

  auto* validate = app.add_subcommand("validate", "check a config and its background model");
  validate->add_option("--config", config_path, "experiment config (YAML)")->required();
  validate->add_flag("--quiet", quiet);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(jflow::ErrorCategory::Usage);
  }

  if (workers <= 0) {
    if (const char* env = std::getenv("JFLOW_WORKERS")) workers = std::atoi(env);
  }
  jflow::set_worker_count(workers > 0 ? workers : 1);

  jflow::CommandContext ctx;
  ctx.quiet = quiet;
  if (!output.empty()) ctx.output_dir = output;
  if (snapshot_every >= 0) ctx.snapshot_every = snapshot_every;

  try {
    if (*compare) return jflow::cmd_compare(dir_a, dir_b, threshold, ctx);
    if (*validate) return jflow::cmd_validate(config_path, ctx);

    const jflow::RunConfig cfg = jflow::load_config(config_path);
    if (*run) return jflow::cmd_run(cfg, ctx);
    return jflow::cmd_critical(cfg, ctx);
  } catch (const jflow::Error& e) {
    std::cerr << "error[" << jflow::category_name(e.category()) << "]: " << e.what() << '\n';
    return static_cast<int>(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error[numerical-failure]: " << e.what() << '\n';
    return static_cast<int>(jflow::ErrorCategory::Numerical);
  }
}
