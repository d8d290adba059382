#include "jflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <tuple>

#include "jflow/functionals.hpp"

namespace jflow {

DiagnosticsRecord diagnostics(const SurfaceModel& model, const FlowState& state, double A) {
  const auto& g = model.G();
  const HermitianMatrix2 lower = g / model.sup_lambda_chi0_omega();

  DiagnosticsRecord r;
  r.t = state.t;
  std::tie(r.inf_phidot, r.sup_phidot) = sup_inf(state.phidot);
  r.osc_phidot = r.sup_phidot - r.inf_phidot;
  r.J = J_functional(model, state.phi, state.chi);
  r.I = I_functional(model, state.phi, state.chi);

  r.sup_lambda_chi_omega = -INFINITY;
  r.inf_lambda_chi_omega = INFINITY;
  r.sup_lambda_omega_chi = -INFINITY;
  r.min_eig_chi = INFINITY;
  r.sup_abs_phi = 0.0;
  r.sup_Q = -INFINITY;
  for (std::size_t i = 0; i < state.chi.size(); ++i) {
    const auto& x = state.chi[i];
    const double lco = trace_contract(x, g);
    const double loc = trace_contract(g, x);
    r.sup_lambda_chi_omega = std::max(r.sup_lambda_chi_omega, lco);
    r.inf_lambda_chi_omega = std::min(r.inf_lambda_chi_omega, lco);
    r.sup_lambda_omega_chi = std::max(r.sup_lambda_omega_chi, loc);
    r.min_eig_chi = std::min(r.min_eig_chi, min_eigenvalue(x - lower));
    r.sup_abs_phi = std::max(r.sup_abs_phi, std::abs(state.phi[i]));
    r.sup_Q = std::max(r.sup_Q, std::log(loc) - A * state.phi[i]);
  }
  return r;
}

double weighted_phidot_integral(const FlowState& state) {
  CompensatedSum sum;
  for (std::size_t i = 0; i < state.phidot.size(); ++i) {
    sum.add(state.phidot[i] * 2.0 * det(state.chi[i]));
  }
  return sum.value() / static_cast<double>(state.phidot.size());
}

// ---------------------------------------------------------------------------

DecayFit fit_decay_rate(std::span<const std::pair<double, double>> series) {
  std::vector<std::pair<double, double>> q;
  for (const auto& [t, osc] : series) {
    if (osc > 1e-14) q.emplace_back(t, std::log(osc));
  }
  if (q.size() < 10) {
    throw DiagnosticError("decay fit needs at least 10 samples with osc > 1e-14, have " +
                          std::to_string(q.size()));
  }
  const std::span<const std::pair<double, double>> tail(q.data() + q.size() / 2,
                                                        q.size() - q.size() / 2);
  const double n = static_cast<double>(tail.size());
  double mt = 0.0, my = 0.0;
  for (const auto& [t, y] : tail) {
    mt += t;
    my += y;
  }
  mt /= n;
  my /= n;
  double stt = 0.0, sty = 0.0, syy = 0.0;
  for (const auto& [t, y] : tail) {
    stt += (t - mt) * (t - mt);
    sty += (t - mt) * (y - my);
    syy += (y - my) * (y - my);
  }
  if (stt <= 0.0) throw DiagnosticError("decay fit: all samples at the same time");
  const double slope = sty / stt;
  double ss_res = 0.0;
  for (const auto& [t, y] : tail) {
    const double e = y - (my + slope * (t - mt));
    ss_res += e * e;
  }
  DecayFit fit;
  fit.eta = slope == 0.0 ? 0.0 : -slope;
  // A flat series is fitted exactly by a zero slope.
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  fit.samples_used = tail.size();
  return fit;
}

DecayFit fit_decay_rate(std::span<const DiagnosticsRecord> series) {
  std::vector<std::pair<double, double>> pts;
  pts.reserve(series.size());
  for (const auto& r : series) pts.emplace_back(r.t, r.osc_phidot);
  return fit_decay_rate(pts);
}

// ---------------------------------------------------------------------------

InvariantMonitor::InvariantMonitor(const SurfaceModel& model, MonitorTolerances tol)
    : tol_(tol),
      envelope_lo_(model.inf_lambda_chi0_omega() - tol.envelope_abs),
      envelope_hi_(model.sup_lambda_chi0_omega() + tol.envelope_abs) {}

void InvariantMonitor::flag(int& counter, const std::string& what, double t) {
  ++counter;
  if (!first_) {
    std::ostringstream os;
    os << what << " at t = " << t;
    first_ = os.str();
  }
}

void InvariantMonitor::observe(const DiagnosticsRecord& rec, double weighted_phidot) {
  if (!prev_) {
    // Floor keeps exact fixed points (osc = 0) from flagging roundoff.
    slack_ = std::max(tol_.max_principle_rel * rec.osc_phidot, 1e-15);
  } else {
    if (rec.sup_phidot > prev_->sup_phidot + slack_) {
      flag(counts_.sup_phidot_increase, "sup phidot increased", rec.t);
    }
    if (rec.inf_phidot < prev_->inf_phidot - slack_) {
      flag(counts_.inf_phidot_decrease, "inf phidot decreased", rec.t);
    }
    if (rec.J > prev_->J + tol_.J_abs) flag(counts_.J_increase, "J increased", rec.t);
  }
  if (rec.inf_lambda_chi_omega < envelope_lo_ || rec.sup_lambda_chi_omega > envelope_hi_) {
    flag(counts_.envelope, "Lambda_chi omega left its initial envelope", rec.t);
  }
  if (std::abs(rec.I) > tol_.I_rel * (1.0 + rec.sup_abs_phi)) {
    flag(counts_.I_conservation, "I(phi) drifted from 0", rec.t);
  }
  if (rec.min_eig_chi < -tol_.lower_bound_abs) {
    flag(counts_.lower_bound, "chi fell below omega / sup Lambda_chi0 omega", rec.t);
  }
  if (std::abs(weighted_phidot) > tol_.zero_mean_abs) {
    flag(counts_.zero_mean, "int phidot chi^2 != 0", rec.t);
  }
  prev_ = rec;
  ++samples_;
}

// ---------------------------------------------------------------------------

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_series_header(std::ostream& out) { out << kSeriesHeader << '\n'; }

void write_series_row(std::ostream& out, const DiagnosticsRecord& r) {
  const double v[] = {r.t,
                      r.sup_phidot,
                      r.inf_phidot,
                      r.osc_phidot,
                      r.J,
                      r.I,
                      r.sup_lambda_chi_omega,
                      r.inf_lambda_chi_omega,
                      r.sup_lambda_omega_chi,
                      r.min_eig_chi,
                      r.sup_abs_phi,
                      r.sup_Q};
  for (std::size_t i = 0; i < std::size(v); ++i) {
    if (i) out << ',';
    out << format_real(v[i]);
  }
  out << '\n';
}

void write_series_csv(std::ostream& out, std::span<const DiagnosticsRecord> series) {
  write_series_header(out);
  for (const auto& r : series) write_series_row(out, r);
}

std::vector<DiagnosticsRecord> read_series_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kSeriesHeader) {
    throw UsageError("series CSV: unexpected header");
  }
  std::vector<DiagnosticsRecord> out;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    double v[12];
    const char* p = line.c_str();
    for (int k = 0; k < 12; ++k) {
      char* end = nullptr;
      v[k] = std::strtod(p, &end);
      const char expect = (k == 11) ? '\0' : ',';
      if (end == p || *end != expect) {
        throw UsageError("series CSV: malformed row at line " + std::to_string(lineno));
      }
      p = end + (k == 11 ? 0 : 1);
    }
    out.push_back({v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8], v[9], v[10], v[11]});
  }
  return out;
}

}  // namespace jflow
