#pragma once

#include <array>
#include <span>
#include <vector>

#include "jflow/grid.hpp"

namespace jflow {

/// Complex dimension of the surface.
inline constexpr int kDim = 2;

/// psi(x) += amplitude * cos(2 pi (k . x) + phase)
struct FourierMode {
  std::array<int, 4> k{0, 0, 0, 0};
  double amplitude = 0.0;
  double phase = 0.0;

  friend bool operator==(const FourierMode&, const FourierMode&) = default;
};

/// Samples a finite Fourier series. Throws ValidationError if a frequency is
/// not strictly below the Nyquist limit of its axis.
ScalarField synthesize(GridShape shape, std::span<const FourierMode> modes);

/// c = int omega ^ chi0 / int chi0^2 for the coordinate field X0 of chi0.
/// Throws ValidationError when the denominator is not positive.
double compute_c(const HermitianMatrix2& g, const FormField& chi0);
double compute_c(const HermitianMatrix2& g, const HermitianMatrix2& h, const ScalarField& psi0);

/** Fixed background of a flow: omega = G (constant) and
 *  chi0 = H + i ddbar psi0 on a flat torus. */
class SurfaceModel {
 public:
  /** Validates the data: G positive definite, chi0 positive definite at every
   *  grid point (ValidationError), and the class condition n c H - G > 0 plus
   *  its pointwise form n c chi0 - omega > 0 (HypothesisError). */
  static SurfaceModel build(GridShape shape, HermitianMatrix2 g, HermitianMatrix2 h,
                            ScalarField psi0);

  const GridShape& shape() const { return shape_; }
  const HermitianMatrix2& G() const { return g_; }
  const HermitianMatrix2& H() const { return h_; }
  const ScalarField& psi0() const { return psi0_; }
  /// Coordinate field of chi0.
  const FormField& chi0() const { return chi0_; }
  double c() const { return c_; }
  bool normalized() const { return normalized_; }

  /// Extremes of Lambda_{chi0} omega over the grid, the max-principle envelope.
  double inf_lambda_chi0_omega() const { return lambda_inf_; }
  double sup_lambda_chi0_omega() const { return lambda_sup_; }

 private:
  friend SurfaceModel normalize_background(const SurfaceModel& model);
  void derive();
  void update_envelope();

  GridShape shape_;
  HermitianMatrix2 g_;
  HermitianMatrix2 h_;
  ScalarField psi0_;
  FormField chi0_;
  double c_ = 0.0;
  bool normalized_ = false;
  double lambda_inf_ = 0.0;
  double lambda_sup_ = 0.0;
};

/// Rescales omega by 1/(n c) so that c = 1/n.
SurfaceModel normalize_background(const SurfaceModel& model);

}  // namespace jflow
