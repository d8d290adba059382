#include "jflow/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "jflow/error.hpp"

namespace jflow {

MAProblem build_ma_problem(const SurfaceModel& model) {
  const double c = model.c();
  const HermitianMatrix2 shift = model.G() / (2.0 * c);
  MAProblem p;
  p.shape = model.shape();
  p.a0 = model.chi0();
  for (auto& x : p.a0.values()) x -= shift;
  if (const auto bad = p.a0.first_non_positive(); bad != p.a0.size()) {
    std::ostringstream os;
    const auto ev = eigenvalues(p.a0[bad]);
    os << "chi0 - omega/(2c) is not positive definite at grid point " << bad << ", eigenvalues ("
       << ev.first << ", " << ev.second << ")";
    throw HypothesisError(os.str());
  }
  p.target = ScalarField(p.shape, det(model.G()) / (4.0 * c * c));
  return p;
}

ScalarField ma_residual(const MAProblem& problem, const FormField& hess) {
  ScalarField r(problem.shape);
  for (std::size_t i = 0; i < r.size(); ++i) {
    r[i] = det(problem.a0[i] + hess[i]) - problem.target[i];
  }
  return r;
}

namespace {

using Vec = std::vector<double>;

double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

void remove_mean(Vec& v) {
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  for (double& x : v) x -= m;
}

double sup_norm(const ScalarField& f) {
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

/// Linearized Monge-Ampere operator at a fixed matrix field X, with the
/// constant-coefficient preconditioner at mean(X).
class Linearization {
 public:
  Linearization(Spectral& sp, const FormField& x) : sp_(sp), x_(x) {
    HermitianMatrix2 mean{};
    for (const auto& m : x.values()) mean += m;
    mean_ = mean / static_cast<double>(x.size());
  }

  Vec apply(const Vec& v) const {
    const FormField h = sp_.complex_hessian(ScalarField(sp_.shape(), v));
    Vec out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = mixed_det(x_[i], h[i]);
    remove_mean(out);
    return out;
  }

  Vec precondition(const Vec& v) const {
    const ScalarField u = sp_.solve_constant_coefficient(mean_, ScalarField(sp_.shape(), v));
    return Vec(u.values().begin(), u.values().end());
  }

 private:
  Spectral& sp_;
  const FormField& x_;
  HermitianMatrix2 mean_;
};

/// Restarted GMRES with right preconditioning; returns the iteration count.
int gmres(const Linearization& op, const Vec& b, Vec& x, double rel_tol, int restart,
          int max_iter) {
  const std::size_t n = b.size();
  x.assign(n, 0.0);
  const double bnorm = norm2(b);
  if (bnorm == 0.0) return 0;
  const double target = rel_tol * bnorm;

  Vec r = b;
  double beta = bnorm;
  int total = 0;
  const auto m = static_cast<std::size_t>(restart);
  while (total < max_iter) {
    std::vector<Vec> v(m + 1);
    std::vector<Vec> h(m + 1, Vec(m, 0.0));
    Vec cs(m, 0.0), sn(m, 0.0), g(m + 1, 0.0);
    v[0] = r;
    for (double& e : v[0]) e /= beta;
    g[0] = beta;

    std::size_t k = 0;
    double res = beta;
    for (; k < m && total < max_iter; ++k, ++total) {
      Vec w = op.apply(op.precondition(v[k]));
      for (std::size_t i = 0; i <= k; ++i) {
        h[i][k] = dot(w, v[i]);
        for (std::size_t q = 0; q < n; ++q) w[q] -= h[i][k] * v[i][q];
      }
      h[k + 1][k] = norm2(w);
      if (h[k + 1][k] > 0.0) {
        v[k + 1] = w;
        for (double& e : v[k + 1]) e /= h[k + 1][k];
      } else {
        v[k + 1].assign(n, 0.0);
      }
      for (std::size_t i = 0; i < k; ++i) {
        const double t = cs[i] * h[i][k] + sn[i] * h[i + 1][k];
        h[i + 1][k] = -sn[i] * h[i][k] + cs[i] * h[i + 1][k];
        h[i][k] = t;
      }
      const double rho = std::hypot(h[k][k], h[k + 1][k]);
      cs[k] = h[k][k] / rho;
      sn[k] = h[k + 1][k] / rho;
      h[k][k] = rho;
      h[k + 1][k] = 0.0;
      g[k + 1] = -sn[k] * g[k];
      g[k] = cs[k] * g[k];
      res = std::abs(g[k + 1]);
      if (res <= target) {
        ++k;
        ++total;
        break;
      }
    }

    Vec y(k, 0.0);
    for (std::size_t i = k; i-- > 0;) {
      double s = g[i];
      for (std::size_t j = i + 1; j < k; ++j) s -= h[i][j] * y[j];
      y[i] = s / h[i][i];
    }
    Vec u(n, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t q = 0; q < n; ++q) u[q] += y[i] * v[i][q];
    }
    const Vec du = op.precondition(u);
    for (std::size_t q = 0; q < n; ++q) x[q] += du[q];

    const Vec ax = op.apply(x);
    for (std::size_t q = 0; q < n; ++q) r[q] = b[q] - ax[q];
    beta = norm2(r);
    if (beta <= target) break;
  }
  return total;
}

}  // namespace

NewtonReport newton_solve(const MAProblem& problem, const NewtonOptions& opt,
                          const ScalarField* initial_guess) {
  Spectral sp(problem.shape);
  NewtonReport rep;
  rep.phi = initial_guess ? *initial_guess : ScalarField(problem.shape);
  if (!(rep.phi.shape() == problem.shape)) throw UsageError("newton_solve: initial guess shape");
  {
    const double m = integrate(rep.phi);
    for (double& v : rep.phi.values()) v -= m;
  }

  FormField hess = sp.complex_hessian(rep.phi);
  FormField x = problem.a0;
  x += hess;
  if (const auto bad = x.first_non_positive(); bad != x.size()) {
    throw NewtonFailure(ErrorCategory::Numerical,
                        "initial guess leaves the positive cone at grid point " +
                            std::to_string(bad),
                        {});
  }
  ScalarField res = ma_residual(problem, hess);
  double rnorm = sup_norm(res);
  rep.residuals.push_back(rnorm);

  while (rnorm > opt.tol) {
    if (rep.iterations == opt.max_iter) {
      throw NewtonFailure(ErrorCategory::NonConvergence,
                          "Newton did not reach tol " + std::to_string(opt.tol) + " in " +
                              std::to_string(opt.max_iter) + " iterations",
                          rep.residuals);
    }
    Linearization lin(sp, x);
    Vec rhs(res.values().begin(), res.values().end());
    for (double& v : rhs) v = -v;
    remove_mean(rhs);
    Vec delta;
    const double eta = std::min(opt.forcing, rnorm);
    rep.krylov_iterations.push_back(
        gmres(lin, rhs, delta, eta, opt.krylov_restart, opt.krylov_max_iter));

    const ScalarField dphi(problem.shape, delta);
    const FormField dhess = sp.complex_hessian(dphi);

    double lambda = 1.0;
    int halvings = 0;
    for (;; ++halvings, lambda *= 0.5) {
      if (halvings > opt.max_halvings) {
        throw NewtonFailure(ErrorCategory::Numerical,
                            "damped Newton step cannot keep positivity and decrease the residual",
                            rep.residuals);
      }
      FormField trial_hess = hess;
      FormField trial_x = x;
      for (std::size_t i = 0; i < x.size(); ++i) {
        trial_hess[i] += lambda * dhess[i];
        trial_x[i] = problem.a0[i] + trial_hess[i];
      }
      if (!trial_x.positive_definite()) continue;
      ScalarField trial_res = ma_residual(problem, trial_hess);
      const double trial_norm = sup_norm(trial_res);
      if (!(trial_norm < rnorm)) continue;

      rep.phi.axpy(lambda, dphi);
      hess = std::move(trial_hess);
      x = std::move(trial_x);
      res = std::move(trial_res);
      rnorm = trial_norm;
      break;
    }
    rep.halvings.push_back(halvings);
    rep.residuals.push_back(rnorm);
    ++rep.iterations;
  }
  return rep;
}

FormField critical_chi(const SurfaceModel& model, const MAProblem& problem,
                       const ScalarField& phi, double tol) {
  const double c = model.c();
  FormField chi = complex_hessian(phi);
  chi += problem.a0;
  chi += model.G() / (2.0 * c);
  if (const auto bad = chi.first_non_positive(); bad != chi.size()) {
    throw Error(ErrorCategory::Numerical,
                "critical chi is not positive definite at grid point " + std::to_string(bad));
  }
  double min_det = INFINITY, dev = 0.0;
  for (const auto& x : chi.values()) {
    min_det = std::min(min_det, det(x));
    dev = std::max(dev, std::abs(trace_contract(x, model.G()) - kDim * c));
  }
  const double bound = 2.0 * c * tol / min_det + 1e-12;
  if (dev > bound) {
    std::ostringstream os;
    os << "critical chi violates the critical equation: sup |Lambda_chi omega - n c| = " << dev
       << " > " << bound;
    throw Error(ErrorCategory::Numerical, os.str());
  }
  return chi;
}

std::array<double, 3> entry_differences(const FormField& a, const FormField& b) {
  if (!(a.shape() == b.shape())) throw UsageError("compare: grid shapes differ");
  std::array<double, 3> d{0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < a.size(); ++i) {
    d[0] = std::max(d[0], std::abs(a[i].a11 - b[i].a11));
    d[1] = std::max(d[1], std::abs(a[i].a22 - b[i].a22));
    d[2] = std::max(d[2], std::abs(a[i].a12 - b[i].a12));
  }
  return d;
}

double compare_with_flow(const FormField& chi_flow, const FormField& chi_ma) {
  const auto d = entry_differences(chi_flow, chi_ma);
  return *std::max_element(d.begin(), d.end());
}

}  // namespace jflow
