#pragma once

#include <array>
#include <string>
#include <vector>

#include "jflow/error.hpp"
#include "jflow/model.hpp"

namespace jflow {

/** det(A0 + i ddbar phi) = target, the reduced form of the critical equation
 *  omega ^ chi = c chi^2 obtained by completing the square:
 *  (chi - omega/(2c))^2 = omega^2 / (4c^2). */
struct MAProblem {
  GridShape shape;
  FormField a0;        // chi0 - omega/(2c)
  ScalarField target;  // det(G)/(4c^2) for the flat background
};

/// Throws HypothesisError if A0 is not positive definite at some point.
MAProblem build_ma_problem(const SurfaceModel& model);

/// Pointwise det(A0 + Hess phi) - target.
ScalarField ma_residual(const MAProblem& problem, const FormField& hess);

struct NewtonOptions {
  double tol = 1e-11;          // on sup |det(A0 + Hess phi) - target|
  int max_iter = 50;
  double forcing = 1e-3;       // relative Krylov tolerance cap per Newton step
  int max_halvings = 20;
  int krylov_restart = 40;
  int krylov_max_iter = 400;
};

struct NewtonReport {
  ScalarField phi;                  // mean zero
  std::vector<double> residuals;    // sup-norm residual before each step and at the end
  std::vector<int> krylov_iterations;
  std::vector<int> halvings;
  int iterations = 0;
};

class NewtonFailure : public Error {
 public:
  NewtonFailure(ErrorCategory category, const std::string& what, std::vector<double> residuals)
      : Error(category, what), residuals_(std::move(residuals)) {}
  const std::vector<double>& residuals() const { return residuals_; }

 private:
  std::vector<double> residuals_;
};

/** Damped inexact Newton iteration. Each linearized equation
 *  mixed_det(A0 + Hess phi, Hess delta) = -residual is solved for mean-zero
 *  delta by restarted GMRES, right-preconditioned with the inverse of the
 *  constant-coefficient operator at the grid mean of A0 + Hess phi.
 *  Throws NewtonFailure (NonConvergence) after max_iter iterations and
 *  (Numerical) when damping cannot keep positivity and decrease. */
NewtonReport newton_solve(const MAProblem& problem, const NewtonOptions& options = {},
                          const ScalarField* initial_guess = nullptr);

/** chi = A0 + Hess phi + G/(2c). Checks positivity and
 *  sup |Lambda_chi omega - n c| <= 2c (tol / min det chi) + 1e-12, the bound
 *  implied by a Monge-Ampere residual of at most tol. Throws Error
 *  (Numerical) if either fails. */
FormField critical_chi(const SurfaceModel& model, const MAProblem& problem,
                       const ScalarField& phi, double tol = 1e-11);

/// Sup over grid points of the largest absolute entry difference.
/// Throws UsageError on a shape mismatch.
double compare_with_flow(const FormField& chi_flow, const FormField& chi_ma);

/// Per-entry sup differences: a11, a22, |a12|.
std::array<double, 3> entry_differences(const FormField& a, const FormField& b);

}  // namespace jflow
