#include "jflow/commands.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "jflow/diagnostics.hpp"
#include "jflow/engine.hpp"
#include "jflow/functionals.hpp"
#include "jflow/oracle.hpp"
#include "jflow/snapshot.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace jflow {

namespace {

std::ostream& out_of(const CommandContext& ctx) { return ctx.out ? *ctx.out : std::cout; }
std::ostream& err_of(const CommandContext& ctx) { return ctx.err ? *ctx.err : std::cerr; }

fs::path output_dir(const RunConfig& cfg, const CommandContext& ctx) {
  fs::path dir = ctx.output_dir ? *ctx.output_dir : fs::path(cfg.output_dir);
  fs::create_directories(dir);
  return dir;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream f(path);
  f << j.dump(2) << '\n';
}

int report_error(const Error& e, const CommandContext& ctx, json* summary,
                 const fs::path* summary_path) {
  err_of(ctx) << "error[" << category_name(e.category()) << "]: " << e.what() << '\n';
  if (summary && summary_path) {
    (*summary)["status"] = "error";
    (*summary)["error_category"] = category_name(e.category());
    (*summary)["error_message"] = e.what();
    (*summary)["exit_code"] = static_cast<int>(e.category());
    write_json(*summary_path, *summary);
  }
  return static_cast<int>(e.category());
}

std::string snapshot_name(const char* stem, std::size_t step) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%06zu.jfld", stem, step);
  return buf;
}

/// Running maxima over the whole series and over its first 10% in time.
struct Boundedness {
  double lambda_max = 0.0, lambda_early = 0.0;
  double phi_max = 0.0, phi_early = 0.0;
  bool ok = true;
};

Boundedness boundedness(const std::vector<DiagnosticsRecord>& series) {
  Boundedness b;
  if (series.empty()) return b;
  const double t_early = 0.1 * series.back().t;
  for (const auto& r : series) {
    b.lambda_max = std::max(b.lambda_max, r.sup_lambda_omega_chi);
    b.phi_max = std::max(b.phi_max, r.sup_abs_phi);
    if (r.t <= t_early) {
      b.lambda_early = std::max(b.lambda_early, r.sup_lambda_omega_chi);
      b.phi_early = std::max(b.phi_early, r.sup_abs_phi);
    }
  }
  b.ok = std::isfinite(b.lambda_max) && std::isfinite(b.phi_max) &&
         b.lambda_max <= 10.0 * b.lambda_early && b.phi_max <= 10.0 * b.phi_early;
  return b;
}

}  // namespace

int cmd_run(const RunConfig& cfg, const CommandContext& ctx) {
  json summary;
  fs::path dir;
  fs::path summary_path;
  try {
    dir = output_dir(cfg, ctx);
    summary_path = dir / "summary.json";
  } catch (const fs::filesystem_error& e) {
    return report_error(UsageError(e.what()), ctx, nullptr, nullptr);
  }

  try {
    const SurfaceModel model = normalize_background(build_model(cfg));
    FlowOptions opts = flow_options(cfg);
    if (ctx.snapshot_every) opts.snapshot_interval = *ctx.snapshot_every;
    opts.A = cfg.A_override ? *cfg.A_override : second_order_exponent(model);
    summary["c"] = model.c();
    summary["A"] = opts.A;
    summary["epsilon"] = positivity_margin(model);

    std::ofstream series_csv(dir / "series.csv");
    write_series_header(series_csv);
    FlowHooks hooks;
    hooks.on_sample = [&](const FlowState& s) {
      write_series_row(series_csv, s.diagnostics);
      if (!ctx.quiet && s.step % (64 * opts.sample_interval) == 0) {
        out_of(ctx) << "t = " << s.t << "  osc(phidot) = " << s.diagnostics.osc_phidot
                    << "  J = " << s.diagnostics.J << '\n';
      }
    };
    hooks.on_snapshot = [&](const FlowState& s) {
      write_snapshot(dir / snapshot_name("phi", s.step), s.phi);
    };

    FlowEngine engine(model);
    FlowResult res;
    try {
      res = engine.run(opts, hooks);
    } catch (const FlowFailure& f) {
      write_snapshot(dir / "phi_failure.jfld", f.last_good().phi);
      write_snapshot(dir / "chi_failure.jfld", f.last_good().chi);
      summary["failure_t"] = f.last_good().t;
      summary["failure_step"] = f.last_good().step;
      throw;
    }
    series_csv.flush();

    const auto& fin = res.final_state;
    write_snapshot(dir / "phi_final.jfld", fin.phi);
    write_snapshot(dir / "chi_final.jfld", fin.chi);

    double phidot_sup = 0.0, lambda_dev = 0.0;
    for (std::size_t i = 0; i < fin.phidot.size(); ++i) {
      phidot_sup = std::max(phidot_sup, std::abs(fin.phidot[i]));
      lambda_dev = std::max(lambda_dev,
                            std::abs(trace_contract(fin.chi[i], model.G()) - kDim * model.c()));
    }

    summary["converged"] = res.converged;
    summary["final_t"] = fin.t;
    summary["steps"] = fin.step;
    summary["samples"] = res.series.size();
    summary["final_sup_abs_phidot"] = phidot_sup;
    summary["final_sup_lambda_deviation"] = lambda_dev;
    try {
      const DecayFit fit = fit_decay_rate(res.series);
      summary["eta"] = fit.eta;
      summary["r_squared"] = fit.r_squared;
    } catch (const DiagnosticError& e) {
      summary["eta"] = nullptr;
      summary["r_squared"] = nullptr;
      summary["decay_fit_note"] = e.what();
    }
    const auto& v = res.violations;
    const Boundedness b = boundedness(res.series);
    summary["violations_sup_phidot_increase"] = v.sup_phidot_increase;
    summary["violations_inf_phidot_decrease"] = v.inf_phidot_decrease;
    summary["violations_envelope"] = v.envelope;
    summary["violations_I_conservation"] = v.I_conservation;
    summary["violations_J_increase"] = v.J_increase;
    summary["violations_lower_bound"] = v.lower_bound;
    summary["violations_zero_mean"] = v.zero_mean;
    summary["violations_blow_up"] = b.ok ? 0 : 1;
    summary["violations_total"] = v.total() + (b.ok ? 0 : 1);
    summary["first_violation"] = res.first_violation ? json(*res.first_violation) : json(nullptr);
    summary["running_max_sup_lambda_omega_chi"] = b.lambda_max;
    summary["early_max_sup_lambda_omega_chi"] = b.lambda_early;
    summary["running_max_sup_abs_phi"] = b.phi_max;
    summary["early_max_sup_abs_phi"] = b.phi_early;

    int code = kExitOk;
    if (!res.converged) {
      code = static_cast<int>(ErrorCategory::NonConvergence);
    } else if (v.total() > 0 || !b.ok) {
      code = static_cast<int>(ErrorCategory::Numerical);
    }
    summary["status"] = code == kExitOk ? "ok" : (res.converged ? "violations" : "timed-out");
    summary["exit_code"] = code;
    write_json(summary_path, summary);
    if (!ctx.quiet) {
      out_of(ctx) << (res.converged ? "converged" : "not converged") << " at t = " << fin.t
                  << " after " << fin.step << " steps; violations: " << summary["violations_total"]
                  << '\n';
    }
    return code;
  } catch (const Error& e) {
    return report_error(e, ctx, &summary, &summary_path);
  }
}

int cmd_critical(const RunConfig& cfg, const CommandContext& ctx) {
  json summary;
  fs::path dir;
  fs::path summary_path;
  try {
    dir = output_dir(cfg, ctx);
    summary_path = dir / "critical_summary.json";
  } catch (const fs::filesystem_error& e) {
    return report_error(UsageError(e.what()), ctx, nullptr, nullptr);
  }

  const auto write_residuals = [&](const NewtonReport* rep, const std::vector<double>& residuals) {
    std::ofstream csv(dir / "newton_residuals.csv");
    csv << "iteration,residual,krylov_iterations,halvings\n";
    for (std::size_t k = 0; k < residuals.size(); ++k) {
      csv << k << ',' << format_real(residuals[k]);
      if (rep && k > 0) {
        csv << ',' << rep->krylov_iterations[k - 1] << ',' << rep->halvings[k - 1];
      } else {
        csv << ",0,0";
      }
      csv << '\n';
    }
  };

  try {
    const SurfaceModel model = normalize_background(build_model(cfg));
    const MAProblem problem = build_ma_problem(model);
    NewtonOptions nopt;
    nopt.tol = cfg.newton_tol;
    nopt.max_iter = cfg.newton_max_iter;
    NewtonReport rep;
    try {
      rep = newton_solve(problem, nopt);
    } catch (const NewtonFailure& f) {
      write_residuals(nullptr, f.residuals());
      throw;
    }
    write_residuals(&rep, rep.residuals);
    const FormField chi = critical_chi(model, problem, rep.phi, nopt.tol);
    write_snapshot(dir / "phi_ma.jfld", rep.phi);
    write_snapshot(dir / "chi_ma.jfld", chi);

    summary["status"] = "ok";
    summary["exit_code"] = kExitOk;
    summary["c"] = model.c();
    summary["newton_iterations"] = rep.iterations;
    summary["final_residual"] = rep.residuals.back();
    write_json(summary_path, summary);
    if (!ctx.quiet) {
      out_of(ctx) << "Newton converged in " << rep.iterations << " iterations, residual "
                  << rep.residuals.back() << '\n';
    }
    return kExitOk;
  } catch (const Error& e) {
    return report_error(e, ctx, &summary, &summary_path);
  }
}

namespace {

fs::path resolve_chi(const fs::path& p) {
  if (fs::is_regular_file(p)) return p;
  if (fs::is_directory(p)) {
    for (const char* name : {"chi_final.jfld", "chi_ma.jfld"}) {
      if (fs::is_regular_file(p / name)) return p / name;
    }
    throw UsageError(p.string() + ": no chi_final.jfld or chi_ma.jfld");
  }
  throw UsageError(p.string() + ": no such file or directory");
}

}  // namespace

int cmd_compare(const fs::path& a, const fs::path& b, double threshold,
                const CommandContext& ctx) {
  try {
    const FormField fa = read_form_snapshot(resolve_chi(a));
    const FormField fb = read_form_snapshot(resolve_chi(b));
    const auto d = entry_differences(fa, fb);
    const double sup = compare_with_flow(fa, fb);
    auto& out = out_of(ctx);
    out << "sup_difference " << format_real(sup) << '\n'
        << "a11 " << format_real(d[0]) << '\n'
        << "a22 " << format_real(d[1]) << '\n'
        << "a12 " << format_real(d[2]) << '\n'
        << "threshold " << format_real(threshold) << '\n';
    return sup <= threshold ? kExitOk : static_cast<int>(ErrorCategory::Numerical);
  } catch (const Error& e) {
    return report_error(e, ctx, nullptr, nullptr);
  }
}

int cmd_validate(const fs::path& config_path, const CommandContext& ctx) {
  try {
    const RunConfig cfg = load_config(config_path);
    const SurfaceModel model = build_model(cfg);
    flow_options(cfg).validate();
    const SurfaceModel normalized = normalize_background(model);
    build_ma_problem(normalized);
    if (!ctx.quiet) {
      out_of(ctx) << "ok: c = " << format_real(model.c())
                  << ", positivity margin eps = " << format_real(positivity_margin(normalized))
                  << '\n';
    }
    return kExitOk;
  } catch (const Error& e) {
    return report_error(e, ctx, nullptr, nullptr);
  }
}

}  // namespace jflow
