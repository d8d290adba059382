#pragma once

#include <complex>
#include <utility>

namespace jflow {

using Complex = std::complex<double>;

/** A 2x2 Hermitian matrix, the pointwise coordinate value of a real (1,1)-form
 *  on a complex surface. Only the upper triangle is stored; the (2,1) entry is
 *  conj(a12) and is never materialized. */
struct HermitianMatrix2 {
  double a11 = 0.0;
  double a22 = 0.0;
  Complex a12{0.0, 0.0};

  static constexpr HermitianMatrix2 identity() { return {1.0, 1.0, {0.0, 0.0}}; }
  static constexpr HermitianMatrix2 diag(double d1, double d2) {
    return {d1, d2, {0.0, 0.0}};
  }
  static constexpr HermitianMatrix2 scalar(double s) { return {s, s, {0.0, 0.0}}; }

  double trace() const { return a11 + a22; }

  HermitianMatrix2& operator+=(const HermitianMatrix2& o) {
    a11 += o.a11;
    a22 += o.a22;
    a12 += o.a12;
    return *this;
  }
  HermitianMatrix2& operator-=(const HermitianMatrix2& o) {
    a11 -= o.a11;
    a22 -= o.a22;
    a12 -= o.a12;
    return *this;
  }
  HermitianMatrix2& operator*=(double s) {
    a11 *= s;
    a22 *= s;
    a12 *= s;
    return *this;
  }

  friend HermitianMatrix2 operator+(HermitianMatrix2 a, const HermitianMatrix2& b) { return a += b; }
  friend HermitianMatrix2 operator-(HermitianMatrix2 a, const HermitianMatrix2& b) { return a -= b; }
  friend HermitianMatrix2 operator*(double s, HermitianMatrix2 a) { return a *= s; }
  friend HermitianMatrix2 operator*(HermitianMatrix2 a, double s) { return a *= s; }
  friend HermitianMatrix2 operator/(HermitianMatrix2 a, double s) { return a *= 1.0 / s; }
  friend bool operator==(const HermitianMatrix2&, const HermitianMatrix2&) = default;
};

/// Threshold on a11 and det for the positive-definiteness predicate.
inline constexpr double kPositiveDefiniteTol = 1e-12;

double det(const HermitianMatrix2& x);

/// Bilinear wedge pairing: alpha ^ beta = mixed_det(A, B) dV, with
/// mixed_det(X, X) = 2 det(X). Equal to tr(adj(A) B).
double mixed_det(const HermitianMatrix2& a, const HermitianMatrix2& b);

/// The 2x2 adjugate; X * adjugate(X) = det(X) I.
HermitianMatrix2 adjugate(const HermitianMatrix2& x);

bool is_positive_definite(const HermitianMatrix2& x);

/// Lambda_X G = tr(X^{-1} G). Throws DomainError unless X is positive definite.
double trace_contract(const HermitianMatrix2& x, const HermitianMatrix2& g);

/// h = X^{-1} G X^{-1}, the coefficient tensor of the linearized flow
/// operator. Throws DomainError unless X is positive definite.
HermitianMatrix2 h_tensor(const HermitianMatrix2& x, const HermitianMatrix2& g);

/// Closed-form eigenvalues, ascending.
std::pair<double, double> eigenvalues(const HermitianMatrix2& x);

double min_eigenvalue(const HermitianMatrix2& x);
double max_eigenvalue(const HermitianMatrix2& x);

}  // namespace jflow
