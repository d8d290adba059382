#pragma once

#include <cstddef>

#include "jflow/grid.hpp"

namespace jflow {

/// One sample of the monitored quantities along a flow.
struct DiagnosticsRecord {
  double t = 0.0;
  double sup_phidot = 0.0;
  double inf_phidot = 0.0;
  double osc_phidot = 0.0;
  double J = 0.0;
  double I = 0.0;
  double sup_lambda_chi_omega = 0.0;  // Lambda_chi omega = tr(chi^{-1} omega)
  double inf_lambda_chi_omega = 0.0;
  double sup_lambda_omega_chi = 0.0;  // Lambda_omega chi = tr(omega^{-1} chi)
  /// Smallest eigenvalue over the grid of chi - omega / sup(Lambda_{chi0} omega).
  double min_eig_chi = 0.0;
  double sup_abs_phi = 0.0;
  /// sup of log(Lambda_omega chi) - A phi.
  double sup_Q = 0.0;

  friend bool operator==(const DiagnosticsRecord&, const DiagnosticsRecord&) = default;
};

/// Current point of a flow. chi and phidot are caches re-derivable from phi.
struct FlowState {
  double t = 0.0;
  std::size_t step = 0;
  ScalarField phi;
  FormField chi;
  ScalarField phidot;
  DiagnosticsRecord diagnostics;
};

}  // namespace jflow
