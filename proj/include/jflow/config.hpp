#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "jflow/engine.hpp"
#include "jflow/model.hpp"

namespace jflow {

/** Experiment configuration. Text form is a YAML mapping:
 *
 *    grid: [8, 8, 8, 8]          # required, even, >= 4
 *    G: [1, 1, 0, 0]             # required: a11, a22, Re a12, Im a12
 *    H: [2, 2, 0, 0]             # required, same layout
 *    psi0:                       # optional list of Fourier modes
 *      - {k: [1, 0, 0, 0], amplitude: 0.05, phase: 0}
 *    sigma: 0.2
 *    tol_stop: 1e-10
 *    t_max: 200
 *    sample_interval: 16
 *    snapshot_interval: 0
 *    A_override: 0.0             # optional
 *    seed: 0
 *    output_dir: out
 *    newton_tol: 1e-11
 *    newton_max_iter: 50
 *    compare_threshold: 1e-5
 *
 *  G and H also accept six reals; the last two slots are reserved and ignored.
 *  Unknown keys are rejected. */
struct RunConfig {
  GridShape grid;
  HermitianMatrix2 G = HermitianMatrix2::identity();
  HermitianMatrix2 H = HermitianMatrix2::scalar(2.0);
  std::vector<FourierMode> psi0;
  double sigma = 0.2;
  double tol_stop = 1e-10;
  double t_max = 200.0;
  int sample_interval = 16;
  int snapshot_interval = 0;
  std::optional<double> A_override;
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  double newton_tol = 1e-11;
  int newton_max_iter = 50;
  double compare_threshold = 1e-5;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Throws ValidationError (bad values, unknown or missing keys) carrying the
/// key path and line.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// Emits a document that parse_config maps back to an equal RunConfig.
std::string serialize_config(const RunConfig& config);

/// Builds and validates the (unnormalized) SurfaceModel.
SurfaceModel build_model(const RunConfig& config);

/// Flow options derived from the config; A is filled in separately.
FlowOptions flow_options(const RunConfig& config);

}  // namespace jflow
