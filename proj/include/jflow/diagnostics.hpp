#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "jflow/error.hpp"
#include "jflow/flow_state.hpp"
#include "jflow/model.hpp"

namespace jflow {

/// Fills every field of a DiagnosticsRecord from a coherent state.
/// A is the exponent in Q = log(Lambda_omega chi) - A phi.
DiagnosticsRecord diagnostics(const SurfaceModel& model, const FlowState& state, double A);

/// int phidot chi^2 (= int phidot 2 det(chi) dV); vanishes along the flow.
double weighted_phidot_integral(const FlowState& state);

/// Raised for diagnostics that cannot be computed; callers report it and go on.
class DiagnosticError : public Error {
 public:
  explicit DiagnosticError(const std::string& what) : Error(ErrorCategory::Numerical, what) {}
};

struct DecayFit {
  double eta = 0.0;
  double r_squared = 0.0;
  std::size_t samples_used = 0;
};

/** Least-squares fit of log(osc) against t over the final half of the samples
 *  with osc > 1e-14. eta is the decay rate (minus the slope). Throws
 *  DiagnosticError with fewer than 10 qualifying samples. */
DecayFit fit_decay_rate(std::span<const std::pair<double, double>> series);
DecayFit fit_decay_rate(std::span<const DiagnosticsRecord> series);

struct MonitorTolerances {
  double max_principle_rel = 1e-8;  // times the initial oscillation of phidot
  double envelope_abs = 1e-6;
  double I_rel = 1e-8;              // |I| <= I_rel (1 + sup|phi|)
  double J_abs = 1e-10;
  double lower_bound_abs = 1e-8;
  double zero_mean_abs = 1e-9;
};

struct ViolationCounts {
  int sup_phidot_increase = 0;
  int inf_phidot_decrease = 0;
  int envelope = 0;
  int I_conservation = 0;
  int J_increase = 0;
  int lower_bound = 0;
  int zero_mean = 0;

  int total() const {
    return sup_phidot_increase + inf_phidot_decrease + envelope + I_conservation + J_increase +
           lower_bound + zero_mean;
  }
};

/** Checks every sample of a run against the maximum principle, the
 *  Lambda_chi omega envelope, I = 0, monotonicity of J, the lower bound on
 *  chi and int phidot chi^2 = 0. */
class InvariantMonitor {
 public:
  explicit InvariantMonitor(const SurfaceModel& model, MonitorTolerances tol = {});

  void observe(const DiagnosticsRecord& rec, double weighted_phidot);

  const ViolationCounts& violations() const { return counts_; }
  std::size_t samples() const { return samples_; }
  /// Human-readable description of the first violation, if any.
  const std::optional<std::string>& first_violation() const { return first_; }

 private:
  void flag(int& counter, const std::string& what, double t);

  MonitorTolerances tol_;
  double envelope_lo_;
  double envelope_hi_;
  std::optional<DiagnosticsRecord> prev_;
  double slack_ = 0.0;
  std::size_t samples_ = 0;
  ViolationCounts counts_;
  std::optional<std::string> first_;
};

/// Column order of series.csv.
inline constexpr const char* kSeriesHeader =
    "t,sup_phidot,inf_phidot,osc_phidot,J,I,sup_lambda_chi_omega,inf_lambda_chi_omega,"
    "sup_lambda_omega_chi,min_eig_chi,sup_abs_phi,sup_Q";

/// Formats a double with 17 significant digits (lossless round trip).
std::string format_real(double v);

void write_series_header(std::ostream& out);
void write_series_row(std::ostream& out, const DiagnosticsRecord& rec);
void write_series_csv(std::ostream& out, std::span<const DiagnosticsRecord> series);
/// Throws UsageError on a wrong header or malformed row.
std::vector<DiagnosticsRecord> read_series_csv(std::istream& in);

}  // namespace jflow
