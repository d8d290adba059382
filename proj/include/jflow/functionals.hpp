#pragma once

#include "jflow/model.hpp"

namespace jflow {

/// J(phi) = 1/2 int phi omega ^ (chi0 + chi_phi), with chi the field of chi_phi.
double J_functional(const SurfaceModel& model, const ScalarField& phi, const FormField& chi);
double J_functional(const SurfaceModel& model, const ScalarField& phi);

/// I(phi) = 1/6 int phi (chi0^2 + chi ^ chi0 + chi^2).
double I_functional(const SurfaceModel& model, const ScalarField& phi, const FormField& chi);
double I_functional(const SurfaceModel& model, const ScalarField& phi);

/** Largest eps in [0, 1/3) with chi0 >= (1 + 3 eps) omega at every grid
 *  point, found by bisection on the pointwise positivity test. Returns 0 when
 *  chi0 - omega is not positive definite somewhere. */
double positivity_margin(const SurfaceModel& model);

/** Exponent A of the second order estimate: A = C0 / eps, where C0 bounds the
 *  bisectional curvature of omega from below. The flat torus has C0 = 0 and
 *  hence A = 0. Throws HypothesisError if C0 > 0 and eps = 0. */
double second_order_exponent(const SurfaceModel& model, double curvature_bound = 0.0);

}  // namespace jflow
