#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "jflow/hermitian.hpp"

namespace jflow {

/** Samples per unit period along the real coordinates x1..x4 of the flat
 *  torus C^2 / Z^4, with z1 = x1 + i x2 and z2 = x3 + i x4.
 *
 *  Samples are stored row-major with x4 varying fastest:
 *    index = ((i1 * n2 + i2) * n3 + i3) * n4 + i4,  x_j = i_j / n_j. */
struct GridShape {
  std::array<int, 4> n{8, 8, 8, 8};

  static GridShape cube(int n) { return GridShape{{n, n, n, n}}; }

  std::size_t size() const {
    return static_cast<std::size_t>(n[0]) * n[1] * n[2] * n[3];
  }
  double spacing(int axis) const { return 1.0 / n[axis]; }
  /// Multi-index -> flat index.
  std::size_t index(int i1, int i2, int i3, int i4) const {
    return ((static_cast<std::size_t>(i1) * n[1] + i2) * n[2] + i3) * n[3] + i4;
  }
  std::array<int, 4> multi_index(std::size_t flat) const;
  /// Real coordinates of a grid point.
  std::array<double, 4> coords(std::size_t flat) const;

  /// Throws ValidationError unless every dimension is even and >= 4.
  void validate() const;

  friend bool operator==(const GridShape&, const GridShape&) = default;
};

/// A real function sampled on the grid.
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(GridShape shape, double fill = 0.0)
      : shape_(shape), data_(shape.size(), fill) {}
  ScalarField(GridShape shape, std::vector<double> data);

  /// Samples f(x1, x2, x3, x4) at every grid point.
  static ScalarField sample(GridShape shape,
                            const std::function<double(const std::array<double, 4>&)>& f);

  const GridShape& shape() const { return shape_; }
  std::size_t size() const { return data_.size(); }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }
  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  ScalarField& operator+=(const ScalarField& o);
  ScalarField& operator*=(double s);
  /// this += s * o
  ScalarField& axpy(double s, const ScalarField& o);

  bool all_finite() const;

 private:
  GridShape shape_;
  std::vector<double> data_;
};

/// A HermitianMatrix2 per grid point.
class FormField {
 public:
  FormField() = default;
  explicit FormField(GridShape shape, HermitianMatrix2 fill = {})
      : shape_(shape), data_(shape.size(), fill) {}

  const GridShape& shape() const { return shape_; }
  std::size_t size() const { return data_.size(); }
  HermitianMatrix2& operator[](std::size_t i) { return data_[i]; }
  const HermitianMatrix2& operator[](std::size_t i) const { return data_[i]; }
  std::span<HermitianMatrix2> values() { return data_; }
  std::span<const HermitianMatrix2> values() const { return data_; }

  FormField& operator+=(const FormField& o);
  FormField& operator+=(const HermitianMatrix2& constant);

  /// Index of the first point that fails is_positive_definite, or size().
  std::size_t first_non_positive() const;
  bool positive_definite() const { return first_non_positive() == size(); }

 private:
  GridShape shape_;
  std::vector<HermitianMatrix2> data_;
};

/** Spectral differentiation on one grid shape. Owns FFTW plans and scratch
 *  buffers, so an instance must not be used from two threads at once;
 *  distinct instances are independent.
 *
 *  First-derivative symbols i k have their Nyquist entry set to zero. A
 *  second derivative along a single real axis uses the full symbol -k^2. */
class Spectral {
 public:
  explicit Spectral(GridShape shape);
  ~Spectral();
  Spectral(const Spectral&) = delete;
  Spectral& operator=(const Spectral&) = delete;

  const GridShape& shape() const { return shape_; }
  std::size_t spectral_size() const { return nspec_; }

  /// Matrix of d^2 phi / dz^i dzbar^j at every grid point.
  FormField complex_hessian(const ScalarField& phi);

  /** Solves mixed_det(M, Hess u) = f for a constant positive-definite M.
   *  The zero mode of f is ignored and u has zero mean. */
  ScalarField solve_constant_coefficient(const HermitianMatrix2& m, const ScalarField& f);

  /// Forward then inverse transform; exposed for round-trip tests.
  ScalarField round_trip(const ScalarField& f);

 private:
  struct Symbols;
  void forward(const ScalarField& f);
  void inverse_into(std::span<double> out);

  GridShape shape_;
  std::size_t nspec_ = 0;
  double* real_buf_ = nullptr;
  Complex* spec_ = nullptr;     // forward output, kept intact
  Complex* scratch_ = nullptr;  // multiplied copy, destroyed by c2r
  void* plan_fwd_ = nullptr;
  void* plan_inv_ = nullptr;
  std::unique_ptr<Symbols> sym_;
};

/// Convenience wrapper building a transient Spectral for one call.
FormField complex_hessian(const ScalarField& phi);

/// Neumaier-compensated running sum; grid reductions use it in index order so
/// results are reproducible bit for bit.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Periodic trapezoidal rule on the unit-volume torus (the grid mean).
double integrate(const ScalarField& f);
double integrate(std::span<const double> f);

/// (min, max) over grid samples.
std::pair<double, double> sup_inf(const ScalarField& f);

/// Evaluates fn pointwise into a new ScalarField.
ScalarField map_points(const FormField& x,
                       const std::function<double(const HermitianMatrix2&)>& fn);

/// Data-parallel width for pointwise loops (1 = sequential). Reductions are
/// always sequential so results do not depend on this setting.
void set_worker_count(int workers);
int worker_count();

}  // namespace jflow
