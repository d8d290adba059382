#include "jflow/engine.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace jflow {

namespace {

std::string domain_message(std::size_t point, const std::array<int, 4>& mi,
                           std::pair<double, double> ev) {
  std::ostringstream os;
  os << "chi lost positivity at grid point " << point << " (" << mi[0] << "," << mi[1] << ","
     << mi[2] << "," << mi[3] << "), eigenvalues (" << ev.first << ", " << ev.second << ")";
  return os.str();
}

double sup_abs(const ScalarField& f) {
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

FlowDomainError::FlowDomainError(std::size_t point, std::array<int, 4> multi_index,
                                 std::pair<double, double> eigenvalues)
    : DomainError(domain_message(point, multi_index, eigenvalues)),
      point_(point),
      multi_index_(multi_index),
      eigenvalues_(eigenvalues) {}

void FlowOptions::validate() const {
  const auto bad = [](const std::string& key, const std::string& why) {
    throw ValidationError(key + ": " + why);
  };
  if (!(sigma > 0.0 && sigma <= 1.0)) bad("sigma", "must lie in (0, 1]");
  if (!(tol_stop > 0.0)) bad("tol_stop", "must be positive");
  if (!(t_max >= 0.0)) bad("t_max", "must be non-negative");
  if (sample_interval < 1) bad("sample_interval", "must be at least 1");
  if (snapshot_interval < 0) bad("snapshot_interval", "must be non-negative");
  if (dt_refresh < 1) bad("dt_refresh", "must be at least 1");
  if (max_halvings < 0) bad("max_halvings", "must be non-negative");
  if (!std::isfinite(A)) bad("A", "must be finite");
}

FlowEngine::FlowEngine(const SurfaceModel& model) : model_(model), spectral_(model.shape()) {}

FormField FlowEngine::chi(const ScalarField& phi) {
  FormField x = spectral_.complex_hessian(phi);
  x += model_.chi0();
  return x;
}

ScalarField FlowEngine::rhs(const FormField& chi) const {
  if (const auto bad = chi.first_non_positive(); bad != chi.size()) {
    throw FlowDomainError(bad, chi.shape().multi_index(bad), eigenvalues(chi[bad]));
  }
  const double c = model_.c();
  const auto& g = model_.G();
  ScalarField out(chi.shape());
  const auto n = static_cast<std::ptrdiff_t>(chi.size());
  const int workers = worker_count();
#pragma omp parallel for num_threads(workers) if (workers > 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    // positivity was checked above, so the closed form is safe here
    out[i] = c - mixed_det(chi[i], g) / (kDim * det(chi[i]));
  }
  return out;
}

FlowState FlowEngine::make_state(ScalarField phi, double t) {
  FlowState s;
  s.t = t;
  s.chi = chi(phi);
  s.phidot = rhs(s.chi);
  s.phi = std::move(phi);
  return s;
}

double FlowEngine::stable_dt(const FlowState& state, double sigma) const {
  double lam = 0.0;
  for (const auto& x : state.chi.values()) {
    lam = std::max(lam, max_eigenvalue(h_tensor(x, model_.G())));
  }
  const auto& shape = model_.shape();
  double dx2 = INFINITY;
  for (int a = 0; a < 4; ++a) dx2 = std::min(dx2, shape.spacing(a) * shape.spacing(a));
  return sigma * dx2 / (std::numbers::pi * std::numbers::pi * lam);
}

FlowState FlowEngine::step_rk4(const FlowState& state, double dt) {
  const ScalarField& k1 = state.phidot;

  ScalarField stage = state.phi;
  stage.axpy(0.5 * dt, k1);
  const ScalarField k2 = rhs(stage);

  stage = state.phi;
  stage.axpy(0.5 * dt, k2);
  const ScalarField k3 = rhs(stage);

  stage = state.phi;
  stage.axpy(dt, k3);
  const ScalarField k4 = rhs(stage);

  ScalarField next = state.phi;
  const double w = dt / 6.0;
  for (std::size_t i = 0; i < next.size(); ++i) {
    next[i] += w * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  FlowState out = make_state(std::move(next), state.t + dt);
  out.step = state.step + 1;
  return out;
}

FlowResult FlowEngine::run(const FlowOptions& opt, const FlowHooks& hooks) {
  opt.validate();
  FlowResult result;
  InvariantMonitor monitor(model_, opt.tolerances);

  FlowState state = make_state(ScalarField(model_.shape()), 0.0);

  const auto sample = [&] {
    state.diagnostics = diagnostics(model_, state, opt.A);
    monitor.observe(state.diagnostics, weighted_phidot_integral(state));
    result.series.push_back(state.diagnostics);
    if (hooks.on_sample) hooks.on_sample(state);
  };
  const auto snapshot_due = [&] {
    return opt.snapshot_interval > 0 && state.step % opt.snapshot_interval == 0;
  };

  sample();
  if (snapshot_due() && hooks.on_snapshot) hooks.on_snapshot(state);

  bool converged = sup_abs(state.phidot) < opt.tol_stop;
  double dt = 0.0;
  while (!converged && state.t < opt.t_max) {
    if (dt == 0.0 || state.step % opt.dt_refresh == 0) dt = stable_dt(state, opt.sigma);

    FlowState next;
    for (int halvings = 0;; ++halvings) {
      const bool clipped = state.t + dt >= opt.t_max;
      const double h = clipped ? opt.t_max - state.t : dt;
      try {
        next = step_rk4(state, h);
        if (clipped) next.t = opt.t_max;
        break;
      } catch (const FlowDomainError& e) {
        if (halvings == opt.max_halvings) {
          FlowFailure failure(std::string(e.what()) + " (after " + std::to_string(halvings) +
                                  " step halvings)",
                              state);
          throw failure;
        }
        dt *= 0.5;
      }
    }
    state = std::move(next);
    converged = sup_abs(state.phidot) < opt.tol_stop;

    const bool last = converged || state.t >= opt.t_max;
    if (last || state.step % opt.sample_interval == 0) sample();
    if (snapshot_due() && hooks.on_snapshot) hooks.on_snapshot(state);
  }

  result.converged = converged;
  result.violations = monitor.violations();
  result.first_violation = monitor.first_violation();
  result.final_state = std::move(state);
  return result;
}

ScalarField flow_rhs(const SurfaceModel& model, const ScalarField& phi) {
  FlowEngine engine(model);
  return engine.rhs(phi);
}

}  // namespace jflow
