#include "jflow/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>

#include "jflow/error.hpp"

namespace jflow {

namespace {

int g_workers = 1;

// The FFTW planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

void set_worker_count(int workers) { g_workers = std::max(1, workers); }
int worker_count() { return g_workers; }

// ---------------------------------------------------------------------------
// GridShape

std::array<int, 4> GridShape::multi_index(std::size_t flat) const {
  std::array<int, 4> idx{};
  for (int axis = 3; axis >= 0; --axis) {
    idx[axis] = static_cast<int>(flat % n[axis]);
    flat /= n[axis];
  }
  return idx;
}

std::array<double, 4> GridShape::coords(std::size_t flat) const {
  const auto idx = multi_index(flat);
  return {double(idx[0]) / n[0], double(idx[1]) / n[1], double(idx[2]) / n[2],
          double(idx[3]) / n[3]};
}

void GridShape::validate() const {
  for (int axis = 0; axis < 4; ++axis) {
    if (n[axis] < 4 || n[axis] % 2 != 0) {
      std::ostringstream os;
      os << "grid dims must be even and >= 4 (axis " << axis + 1 << " has " << n[axis] << ")";
      throw ValidationError(os.str());
    }
  }
}

// ---------------------------------------------------------------------------
// ScalarField

ScalarField::ScalarField(GridShape shape, std::vector<double> data)
    : shape_(shape), data_(std::move(data)) {
  if (data_.size() != shape_.size()) {
    throw UsageError("ScalarField: sample count does not match grid shape");
  }
}

ScalarField ScalarField::sample(GridShape shape,
                                const std::function<double(const std::array<double, 4>&)>& f) {
  ScalarField out(shape);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(shape.coords(i));
  return out;
}

ScalarField& ScalarField::operator+=(const ScalarField& o) { return axpy(1.0, o); }

ScalarField& ScalarField::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

ScalarField& ScalarField::axpy(double s, const ScalarField& o) {
  if (!(o.shape_ == shape_)) throw UsageError("ScalarField: shape mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += s * o.data_[i];
  return *this;
}

bool ScalarField::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

// ---------------------------------------------------------------------------
// FormField

FormField& FormField::operator+=(const FormField& o) {
  if (!(o.shape_ == shape_)) throw UsageError("FormField: shape mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

FormField& FormField::operator+=(const HermitianMatrix2& constant) {
  for (auto& x : data_) x += constant;
  return *this;
}

std::size_t FormField::first_non_positive() const {
  for (std::size_t i = 0; i < data_.size(); ++i) {
    if (!is_positive_definite(data_[i])) return i;
  }
  return data_.size();
}

// ---------------------------------------------------------------------------
// Spectral

struct Spectral::Symbols {
  // Per spectral mode, real multipliers of the four output channels of the
  // complex Hessian: H11, H22, Re H12, Im H12.
  std::vector<double> h11, h22, re12, im12;
};

namespace {

// Signed wave number 2 pi m for storage index m on an axis of length n.
double wavenumber(int m, int n) {
  const int s = (m <= n / 2) ? m : m - n;
  return 2.0 * std::numbers::pi * s;
}

// Wave number with the Nyquist entry zeroed.
double wavenumber_odd(int m, int n) { return (2 * m == n) ? 0.0 : wavenumber(m, n); }

}  // namespace

Spectral::Spectral(GridShape shape) : shape_(shape), sym_(std::make_unique<Symbols>()) {
  shape_.validate();
  const auto& n = shape_.n;
  const int n4h = n[3] / 2 + 1;
  nspec_ = static_cast<std::size_t>(n[0]) * n[1] * n[2] * n4h;

  real_buf_ = fftw_alloc_real(shape_.size());
  spec_ = reinterpret_cast<Complex*>(fftw_alloc_complex(nspec_));
  scratch_ = reinterpret_cast<Complex*>(fftw_alloc_complex(nspec_));
  {
    std::lock_guard lock(planner_mutex());
    plan_fwd_ = fftw_plan_dft_r2c(4, n.data(), real_buf_,
                                  reinterpret_cast<fftw_complex*>(spec_), FFTW_ESTIMATE);
    plan_inv_ = fftw_plan_dft_c2r(4, n.data(), reinterpret_cast<fftw_complex*>(scratch_),
                                  real_buf_, FFTW_ESTIMATE);
  }

  auto& s = *sym_;
  s.h11.resize(nspec_);
  s.h22.resize(nspec_);
  s.re12.resize(nspec_);
  s.im12.resize(nspec_);
  std::size_t q = 0;
  for (int m1 = 0; m1 < n[0]; ++m1) {
    const double d1 = wavenumber_odd(m1, n[0]);
    for (int m2 = 0; m2 < n[1]; ++m2) {
      const double d2 = wavenumber_odd(m2, n[1]);
      for (int m3 = 0; m3 < n[2]; ++m3) {
        const double d3 = wavenumber_odd(m3, n[2]);
        for (int m4 = 0; m4 < n4h; ++m4, ++q) {
          const double d4 = wavenumber_odd(m4, n[3]);
          // d_{z1} d_{zbar1} = (d11 + d22)/4,  d_{z2} d_{zbar2} = (d33 + d44)/4,
          // d_{z1} d_{zbar2} = (d13 + d24)/4 + i (d14 - d23)/4.
          // Every factor is a first derivative, so |H12|^2 = H11 H22 holds per mode,
          // Nyquist included. The discrete integral identities depend on it.
          s.h11[q] = -0.25 * (d1 * d1 + d2 * d2);
          s.h22[q] = -0.25 * (d3 * d3 + d4 * d4);
          s.re12[q] = -0.25 * (d1 * d3 + d2 * d4);
          s.im12[q] = -0.25 * (d1 * d4 - d2 * d3);
        }
      }
    }
  }
}

Spectral::~Spectral() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_inv_));
  fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
  fftw_free(scratch_);
  fftw_free(spec_);
  fftw_free(real_buf_);
}

void Spectral::forward(const ScalarField& f) {
  if (!(f.shape() == shape_)) throw UsageError("Spectral: field shape mismatch");
  std::copy(f.values().begin(), f.values().end(), real_buf_);
  fftw_execute(static_cast<fftw_plan>(plan_fwd_));
}

void Spectral::inverse_into(std::span<double> out) {
  fftw_execute(static_cast<fftw_plan>(plan_inv_));
  const double norm = 1.0 / static_cast<double>(shape_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = real_buf_[i] * norm;
}

FormField Spectral::complex_hessian(const ScalarField& phi) {
  forward(phi);
  const std::size_t npts = shape_.size();
  FormField out(shape_);
  std::vector<double> channel(npts);
  const std::vector<double>* mult[4] = {&sym_->h11, &sym_->h22, &sym_->re12, &sym_->im12};
  const int workers = worker_count();
  for (int c = 0; c < 4; ++c) {
    const auto& m = *mult[c];
    const auto nspec = static_cast<std::ptrdiff_t>(nspec_);
#pragma omp parallel for num_threads(workers) if (workers > 1)
    for (std::ptrdiff_t q = 0; q < nspec; ++q) scratch_[q] = spec_[q] * m[q];
    inverse_into(channel);
    auto dst = out.values();
    switch (c) {
      case 0: for (std::size_t i = 0; i < npts; ++i) dst[i].a11 = channel[i]; break;
      case 1: for (std::size_t i = 0; i < npts; ++i) dst[i].a22 = channel[i]; break;
      case 2: for (std::size_t i = 0; i < npts; ++i) dst[i].a12.real(channel[i]); break;
      case 3: for (std::size_t i = 0; i < npts; ++i) dst[i].a12.imag(channel[i]); break;
    }
  }
  return out;
}

ScalarField Spectral::solve_constant_coefficient(const HermitianMatrix2& m, const ScalarField& f) {
  forward(f);
  const auto& s = *sym_;
  const double cr = 2.0 * m.a12.real(), ci = 2.0 * m.a12.imag();
  for (std::size_t q = 0; q < nspec_; ++q) {
    const double symbol = m.a11 * s.h22[q] + m.a22 * s.h11[q] - cr * s.re12[q] - ci * s.im12[q];
    scratch_[q] = (q == 0 || symbol == 0.0) ? Complex{} : spec_[q] / symbol;
  }
  ScalarField u(shape_);
  inverse_into(u.values());
  return u;
}

ScalarField Spectral::round_trip(const ScalarField& f) {
  forward(f);
  std::copy(spec_, spec_ + nspec_, scratch_);
  ScalarField out(shape_);
  inverse_into(out.values());
  return out;
}

FormField complex_hessian(const ScalarField& phi) {
  Spectral sp(phi.shape());
  return sp.complex_hessian(phi);
}

// ---------------------------------------------------------------------------
// Reductions

double integrate(std::span<const double> f) {
  if (f.empty()) return 0.0;
  CompensatedSum sum;
  for (double v : f) sum.add(v);
  return sum.value() / static_cast<double>(f.size());
}

double integrate(const ScalarField& f) { return integrate(f.values()); }

std::pair<double, double> sup_inf(const ScalarField& f) {
  const auto [lo, hi] = std::minmax_element(f.values().begin(), f.values().end());
  return {*lo, *hi};
}

ScalarField map_points(const FormField& x,
                       const std::function<double(const HermitianMatrix2&)>& fn) {
  ScalarField out(x.shape());
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = fn(x[i]);
  return out;
}

}  // namespace jflow
