#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>

#include "jflow/config.hpp"

namespace jflow {

/** Exit statuses shared by every subcommand:
 *  0 ok, 1 usage, 2 validation, 3 hypothesis violation,
 *  4 numerical failure, 5 non-convergence. */
inline constexpr int kExitOk = 0;

struct CommandContext {
  std::optional<std::filesystem::path> output_dir;  // overrides config.output_dir
  std::optional<int> snapshot_every;                // overrides config.snapshot_interval
  bool quiet = false;
  std::ostream* out = nullptr;  // progress and reports; nullptr = std::cout
  std::ostream* err = nullptr;  // nullptr = std::cerr
};

/** Integrates the flow. Writes series.csv, phi_NNNNNN.jfld snapshots,
 *  phi_final.jfld, chi_final.jfld and summary.json into the output directory.
 *  Returns 0 iff the flow converged with no monitored inequality violated. */
int cmd_run(const RunConfig& config, const CommandContext& ctx = {});

/// Solves the Monge-Ampere reduction. Writes phi_ma.jfld, chi_ma.jfld,
/// newton_residuals.csv and critical_summary.json. Returns 0 iff Newton converged.
int cmd_critical(const RunConfig& config, const CommandContext& ctx = {});

/** Compares the chi snapshots of two run directories (chi_final.jfld, else
 *  chi_ma.jfld; a path to a .jfld file is used directly). Returns 0 iff the
 *  sup entry difference is at most threshold, 4 if it is larger. */
int cmd_compare(const std::filesystem::path& a, const std::filesystem::path& b, double threshold,
                const CommandContext& ctx = {});

/// Parses the config and builds the model without running anything.
int cmd_validate(const std::filesystem::path& config_path, const CommandContext& ctx = {});

}  // namespace jflow
