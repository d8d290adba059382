#include "jflow/hermitian.hpp"

#include <cmath>
#include <sstream>

#include "jflow/error.hpp"

namespace jflow {

const char* category_name(ErrorCategory c) noexcept {
  switch (c) {
    case ErrorCategory::Usage: return "usage";
    case ErrorCategory::Validation: return "validation";
    case ErrorCategory::Hypothesis: return "hypothesis-violation";
    case ErrorCategory::Numerical: return "numerical-failure";
    case ErrorCategory::NonConvergence: return "non-convergence";
  }
  return "unknown";
}

double det(const HermitianMatrix2& x) { return x.a11 * x.a22 - std::norm(x.a12); }

double mixed_det(const HermitianMatrix2& a, const HermitianMatrix2& b) {
  // A12 conj(B12) + conj(A12) B12 = 2 Re(A12 conj(B12)), written so that the
  // expression is symmetric in (a, b) bit for bit.
  const double cross = a.a12.real() * b.a12.real() + a.a12.imag() * b.a12.imag();
  return a.a11 * b.a22 + a.a22 * b.a11 - 2.0 * cross;
}

HermitianMatrix2 adjugate(const HermitianMatrix2& x) { return {x.a22, x.a11, -x.a12}; }

bool is_positive_definite(const HermitianMatrix2& x) {
  return x.a11 > kPositiveDefiniteTol && det(x) > kPositiveDefiniteTol;
}

namespace {

[[noreturn]] void throw_not_pd(const char* op, const HermitianMatrix2& x) {
  std::ostringstream os;
  os << op << ": matrix not positive definite (a11=" << x.a11 << ", a22=" << x.a22
     << ", a12=" << x.a12 << ", det=" << det(x) << ")";
  throw DomainError(os.str());
}

}  // namespace

double trace_contract(const HermitianMatrix2& x, const HermitianMatrix2& g) {
  if (!is_positive_definite(x)) throw_not_pd("trace_contract", x);
  // tr(X^{-1} G) det X = tr(adj(X) G) = mixed_det(X, G)
  return mixed_det(x, g) / det(x);
}

HermitianMatrix2 h_tensor(const HermitianMatrix2& x, const HermitianMatrix2& g) {
  if (!is_positive_definite(x)) throw_not_pd("h_tensor", x);
  // X^{-1} = adj(X)/det(X); form adj G adj explicitly in the upper triangle.
  const double d = det(x);
  const double p = x.a22, q = x.a11;
  const Complex r = -x.a12;  // adj = [[p, r], [conj r, q]]
  const double g11 = g.a11, g22 = g.a22;
  const Complex g12 = g.a12;
  // M = adj * G
  const Complex m11 = p * g11 + r * std::conj(g12);
  const Complex m12 = p * g12 + r * g22;
  const Complex m21 = std::conj(r) * g11 + q * std::conj(g12);
  const Complex m22 = std::conj(r) * g12 + q * g22;
  // (M * adj) upper triangle
  const double h11 = (m11 * p + m12 * std::conj(r)).real();
  const double h22 = (m21 * r + m22 * q).real();
  const Complex h12 = m11 * r + m12 * q;
  const double s = 1.0 / (d * d);
  return {h11 * s, h22 * s, h12 * s};
}

std::pair<double, double> eigenvalues(const HermitianMatrix2& x) {
  const double mean = 0.5 * (x.a11 + x.a22);
  const double half_gap = 0.5 * (x.a11 - x.a22);
  // sqrt(mean^2 - det) rewritten without cancellation
  const double radius = std::hypot(half_gap, std::abs(x.a12));
  return {mean - radius, mean + radius};
}

double min_eigenvalue(const HermitianMatrix2& x) { return eigenvalues(x).first; }
double max_eigenvalue(const HermitianMatrix2& x) { return eigenvalues(x).second; }

}  // namespace jflow
