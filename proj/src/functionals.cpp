#include "jflow/functionals.hpp"

#include "jflow/error.hpp"

namespace jflow {

namespace {

FormField chi_of(const SurfaceModel& model, const ScalarField& phi) {
  FormField chi = complex_hessian(phi);
  chi += model.chi0();
  return chi;
}

void check_shapes(const SurfaceModel& model, const ScalarField& phi, const FormField& chi) {
  if (!(phi.shape() == model.shape()) || !(chi.shape() == model.shape())) {
    throw UsageError("functional: field shape does not match model");
  }
}

}  // namespace

double J_functional(const SurfaceModel& model, const ScalarField& phi, const FormField& chi) {
  check_shapes(model, phi, chi);
  const auto& x0 = model.chi0();
  CompensatedSum sum;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    sum.add(phi[i] * mixed_det(model.G(), x0[i] + chi[i]));
  }
  return 0.5 * sum.value() / static_cast<double>(phi.size());
}

double J_functional(const SurfaceModel& model, const ScalarField& phi) {
  return J_functional(model, phi, chi_of(model, phi));
}

double I_functional(const SurfaceModel& model, const ScalarField& phi, const FormField& chi) {
  check_shapes(model, phi, chi);
  const auto& x0 = model.chi0();
  CompensatedSum sum;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    sum.add(phi[i] * (2.0 * det(x0[i]) + mixed_det(chi[i], x0[i]) + 2.0 * det(chi[i])));
  }
  return sum.value() / (6.0 * static_cast<double>(phi.size()));
}

double I_functional(const SurfaceModel& model, const ScalarField& phi) {
  return I_functional(model, phi, chi_of(model, phi));
}

double positivity_margin(const SurfaceModel& model) {
  const auto holds = [&](double eps) {
    const HermitianMatrix2 scaled = (1.0 + 3.0 * eps) * model.G();
    for (const auto& x : model.chi0().values()) {
      if (!is_positive_definite(x - scaled)) return false;
    }
    return true;
  };
  if (!holds(0.0)) return 0.0;
  double lo = 0.0, hi = 1.0 / 3.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (holds(mid) ? lo : hi) = mid;
  }
  return lo;
}

double second_order_exponent(const SurfaceModel& model, double curvature_bound) {
  if (curvature_bound <= 0.0) return 0.0;
  const double eps = positivity_margin(model);
  if (eps <= 0.0) throw HypothesisError("chi0 - omega > 0 fails; no admissible eps for A = C0/eps");
  return curvature_bound / eps;
}

}  // namespace jflow
