#include "jflow/model.hpp"

#include <cmath>
#include <cstdint>
#include <numeric>
#include <numbers>
#include <sstream>

#include "jflow/error.hpp"

namespace jflow {

ScalarField synthesize(GridShape shape, std::span<const FourierMode> modes) {
  for (const auto& m : modes) {
    for (int a = 0; a < 4; ++a) {
      if (2 * std::abs(m.k[a]) >= shape.n[a]) {
        std::ostringstream os;
        os << "psi0 mode frequency " << m.k[a] << " on axis " << a + 1
           << " is not below the Nyquist limit " << shape.n[a] / 2;
        throw ValidationError(os.str());
      }
    }
  }
  // Phases are reduced exactly over the common period before scaling by 2 pi.
  std::int64_t period = 1;
  for (int a = 0; a < 4; ++a) period = std::lcm(period, std::int64_t(shape.n[a]));
  ScalarField out(shape);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto idx = shape.multi_index(i);
    double v = 0.0;
    for (const auto& m : modes) {
      std::int64_t num = 0;
      for (int a = 0; a < 4; ++a) num += std::int64_t(m.k[a]) * idx[a] * (period / shape.n[a]);
      num %= period;
      if (2 * num > period) num -= period;
      else if (2 * num < -period) num += period;
      v += m.amplitude * std::cos(2.0 * std::numbers::pi * double(num) / double(period) + m.phase);
    }
    out[i] = v;
  }
  return out;
}

double compute_c(const HermitianMatrix2& g, const FormField& chi0) {
  CompensatedSum num_sum, den_sum;
  for (const auto& x : chi0.values()) {
    num_sum.add(mixed_det(g, x));
    den_sum.add(2.0 * det(x));
  }
  const double num = num_sum.value(), den = den_sum.value();
  if (!(den > 0.0)) throw ValidationError("compute_c: int chi0^2 is not positive");
  return num / den;
}

double compute_c(const HermitianMatrix2& g, const HermitianMatrix2& h, const ScalarField& psi0) {
  FormField chi0 = complex_hessian(psi0);
  chi0 += h;
  return compute_c(g, chi0);
}

namespace {

std::string point_message(const char* what, const GridShape& shape, std::size_t idx,
                          const HermitianMatrix2& x) {
  const auto [lo, hi] = eigenvalues(x);
  const auto mi = shape.multi_index(idx);
  std::ostringstream os;
  os << what << " at grid point (" << mi[0] << "," << mi[1] << "," << mi[2] << "," << mi[3]
     << "), eigenvalues (" << lo << ", " << hi << ")";
  return os.str();
}

}  // namespace

SurfaceModel SurfaceModel::build(GridShape shape, HermitianMatrix2 g, HermitianMatrix2 h,
                                 ScalarField psi0) {
  shape.validate();
  if (!(psi0.shape() == shape)) throw ValidationError("psi0 grid does not match model grid");
  if (!psi0.all_finite()) throw ValidationError("psi0 has non-finite samples");
  if (!is_positive_definite(g)) throw ValidationError("G (omega) is not positive definite");

  SurfaceModel m;
  m.shape_ = shape;
  m.g_ = g;
  m.h_ = h;
  m.psi0_ = std::move(psi0);
  m.derive();
  return m;
}

void SurfaceModel::derive() {
  chi0_ = complex_hessian(psi0_);
  chi0_ += h_;
  if (const auto bad = chi0_.first_non_positive(); bad != chi0_.size()) {
    throw ValidationError(point_message("chi0 is not positive definite", shape_, bad, chi0_[bad]));
  }
  c_ = compute_c(g_, chi0_);

  const double nc = kDim * c_;
  if (!is_positive_definite(nc * h_ - g_)) {
    throw HypothesisError("class condition n c chi0 - omega > 0 fails for the constant representative");
  }
  for (std::size_t i = 0; i < chi0_.size(); ++i) {
    if (!is_positive_definite(nc * chi0_[i] - g_)) {
      throw HypothesisError(point_message("n c chi0 - omega is not positive definite", shape_, i, nc * chi0_[i] - g_));
    }
  }

  update_envelope();
}

void SurfaceModel::update_envelope() {
  lambda_inf_ = INFINITY;
  lambda_sup_ = -INFINITY;
  for (const auto& x : chi0_.values()) {
    const double l = trace_contract(x, g_);
    lambda_inf_ = std::min(lambda_inf_, l);
    lambda_sup_ = std::max(lambda_sup_, l);
  }
}

SurfaceModel normalize_background(const SurfaceModel& model) {
  SurfaceModel out = model;
  out.g_ = model.g_ / (kDim * model.c_);
  out.c_ = compute_c(out.g_, out.chi0_);
  out.normalized_ = true;
  out.update_envelope();
  return out;
}

}  // namespace jflow
