#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "jflow/diagnostics.hpp"
#include "jflow/flow_state.hpp"
#include "jflow/model.hpp"

namespace jflow {

/// chi lost positivity somewhere on the grid.
class FlowDomainError : public DomainError {
 public:
  FlowDomainError(std::size_t point, std::array<int, 4> multi_index,
                  std::pair<double, double> eigenvalues);

  std::size_t point() const { return point_; }
  const std::array<int, 4>& multi_index() const { return multi_index_; }
  std::pair<double, double> eigenvalues() const { return eigenvalues_; }

 private:
  std::size_t point_;
  std::array<int, 4> multi_index_;
  std::pair<double, double> eigenvalues_;
};

/// A run aborted; carries the last state that passed every check.
class FlowFailure : public Error {
 public:
  FlowFailure(const std::string& what, FlowState last_good)
      : Error(ErrorCategory::Numerical, what), last_good_(std::move(last_good)) {}
  const FlowState& last_good() const { return last_good_; }

 private:
  FlowState last_good_;
};

struct FlowOptions {
  double sigma = 0.2;       // dt safety factor, in (0, 1]
  double tol_stop = 1e-10;  // stop when sup |phidot| < tol_stop
  double t_max = 200.0;
  int sample_interval = 16;    // steps between diagnostics records
  int snapshot_interval = 0;   // steps between snapshots, 0 = never
  int dt_refresh = 16;         // steps between stable_dt evaluations
  int max_halvings = 10;
  double A = 0.0;              // exponent of Q = log(Lambda_omega chi) - A phi
  MonitorTolerances tolerances;

  /// Throws ValidationError naming the offending option.
  void validate() const;
};

struct FlowHooks {
  std::function<void(const FlowState&)> on_sample;    // after diagnostics are filled
  std::function<void(const FlowState&)> on_snapshot;
};

struct FlowResult {
  FlowState final_state;
  std::vector<DiagnosticsRecord> series;
  bool converged = false;
  ViolationCounts violations;
  std::optional<std::string> first_violation;
};

/** Explicit integrator for the J-flow d phi/dt = c - Lambda_chi omega / n on a
 *  SurfaceModel, starting from phi = 0. Holds the spectral workspace, so one
 *  engine serves one thread. */
class FlowEngine {
 public:
  explicit FlowEngine(const SurfaceModel& model);

  const SurfaceModel& model() const { return model_; }

  /// chi_phi = chi0 + i ddbar phi.
  FormField chi(const ScalarField& phi);
  /// Throws FlowDomainError unless chi is positive definite at every point.
  ScalarField rhs(const FormField& chi) const;
  ScalarField rhs(const ScalarField& phi) { return rhs(chi(phi)); }

  /// State at potential phi and time t with caches filled.
  FlowState make_state(ScalarField phi, double t = 0.0);

  /// sigma min(dx^2) / (pi^2 max lambda_max(h)).
  double stable_dt(const FlowState& state, double sigma = 0.2) const;

  /// One classical RK4 step. Throws FlowDomainError if chi loses positivity
  /// at any stage; the input state is left untouched.
  FlowState step_rk4(const FlowState& state, double dt);

  FlowResult run(const FlowOptions& options, const FlowHooks& hooks = {});

 private:
  SurfaceModel model_;
  Spectral spectral_;
};

/// Convenience: phidot for one potential.
ScalarField flow_rhs(const SurfaceModel& model, const ScalarField& phi);

}  // namespace jflow
