#pragma once

// Generators, fixtures and independent reference formulas shared by the tests.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "jflow/grid.hpp"
#include "jflow/hermitian.hpp"
#include "jflow/model.hpp"

namespace jflow::testing {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Random Hermitian positive definite matrix with eigenvalues in roughly [0.05, 4].
template <class Rng>
HermitianMatrix2 random_positive(Rng& rng) {
  std::uniform_real_distribution<double> diag(0.2, 3.0);
  std::uniform_real_distribution<double> frac(0.0, 0.9);
  std::uniform_real_distribution<double> angle(0.0, kTwoPi);
  const double a11 = diag(rng), a22 = diag(rng);
  const double r = std::sqrt(frac(rng) * a11 * a22);
  return {a11, a22, std::polar(r, angle(rng))};
}

/// Band-limited Fourier modes with every |k_j| < n_j / 2.
template <class Rng>
std::vector<FourierMode> random_modes(Rng& rng, const GridShape& shape, int count,
                                      double max_amplitude) {
  std::vector<FourierMode> modes;
  std::uniform_real_distribution<double> amp(-max_amplitude, max_amplitude);
  std::uniform_real_distribution<double> phase(0.0, kTwoPi);
  for (int m = 0; m < count; ++m) {
    FourierMode mode;
    for (int j = 0; j < 4; ++j) {
      const int lim = shape.n[j] / 2 - 1;
      std::uniform_int_distribution<int> k(-lim, lim);
      mode.k[j] = k(rng);
    }
    mode.amplitude = amp(rng);
    mode.phase = phase(rng);
    modes.push_back(mode);
  }
  return modes;
}

/// Closed-form d^2/dz^i dzbar^j of sum A cos(2 pi k.x + p) at the point x.
inline HermitianMatrix2 analytic_hessian(const std::vector<FourierMode>& modes,
                                         const std::array<double, 4>& x) {
  double d[4][4] = {};
  for (const auto& m : modes) {
    // Extended precision keeps the phase error well below the tolerances checked.
    long double turns = 0.0L;
    for (int j = 0; j < 4; ++j) turns += static_cast<long double>(m.k[j]) * x[j];
    turns = std::fmod(turns, 1.0L);
    const long double theta = 2.0L * std::numbers::pi_v<long double> * turns + m.phase;
    const double c = -m.amplitude * kTwoPi * kTwoPi * static_cast<double>(std::cos(theta));
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) d[a][b] += c * m.k[a] * m.k[b];
  }
  return {0.25 * (d[0][0] + d[1][1]), 0.25 * (d[2][2] + d[3][3]),
          {0.25 * (d[0][2] + d[1][3]), 0.25 * (d[0][3] - d[1][2])}};
}

inline double sup_entry_diff(const HermitianMatrix2& a, const HermitianMatrix2& b) {
  return std::max({std::abs(a.a11 - b.a11), std::abs(a.a22 - b.a22),
                   std::abs(a.a12.real() - b.a12.real()), std::abs(a.a12.imag() - b.a12.imag())});
}

inline std::vector<FourierMode> standard_modes() { return {FourierMode{{1, 0, 0, 0}, 0.05, 0.0}}; }

/// omega = I, chi0 = 2I + i ddbar(0.05 cos 2 pi x1), normalized.
inline SurfaceModel standard_model(int n = 8) {
  const GridShape shape = GridShape::cube(n);
  const auto modes = standard_modes();
  return normalize_background(SurfaceModel::build(shape, HermitianMatrix2::identity(),
                                                  HermitianMatrix2::scalar(2.0),
                                                  synthesize(shape, modes)));
}

/// omega = I, chi0 = 2I: a fixed point of the flow.
inline SurfaceModel constant_model(int n = 8) {
  const GridShape shape = GridShape::cube(n);
  return normalize_background(SurfaceModel::build(shape, HermitianMatrix2::identity(),
                                                  HermitianMatrix2::scalar(2.0),
                                                  ScalarField(shape)));
}

/// A perturbation mixing z1 and z2 directions, so the reduced equation is
/// genuinely nonlinear.
inline SurfaceModel mixed_model(int n = 8) {
  const GridShape shape = GridShape::cube(n);
  const std::vector<FourierMode> modes = {FourierMode{{1, 0, 1, 0}, 0.02, 0.0},
                                          FourierMode{{0, 1, 0, 1}, 0.015, 0.5},
                                          FourierMode{{1, 0, 0, 0}, 0.03, 0.0}};
  return normalize_background(SurfaceModel::build(shape, HermitianMatrix2::identity(),
                                                   HermitianMatrix2::scalar(2.0),
                                                   synthesize(shape, modes)));
}

}  // namespace jflow::testing
