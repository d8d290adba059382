#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "jflow/diagnostics.hpp"
#include "jflow/engine.hpp"
#include "jflow/error.hpp"
#include "jflow/functionals.hpp"
#include "support.hpp"

using namespace jflow;
using namespace jflow::testing;

namespace {

/// Mean of f(phi_i, chi_i) over the grid, summed plainly.
template <class F>
double grid_mean(const ScalarField& phi, const FormField& chi, F f) {
  double s = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i) s += f(phi[i], chi[i]);
  return s / static_cast<double>(phi.size());
}

DiagnosticsRecord record(double t, double sup, double inf) {
  DiagnosticsRecord r;
  r.t = t;
  r.sup_phidot = sup;
  r.inf_phidot = inf;
  r.osc_phidot = sup - inf;
  r.sup_lambda_chi_omega = 1.0;
  r.inf_lambda_chi_omega = 1.0;
  r.min_eig_chi = 0.1;
  return r;
}

}  // namespace

TEST_CASE("J and I examples") {
  const auto fixed = constant_model();
  const GridShape shape = fixed.shape();
  CHECK(J_functional(fixed, ScalarField(shape)) == 0.0);
  CHECK(I_functional(fixed, ScalarField(shape)) == 0.0);
  for (double k : {1.0, -0.37, 2.5}) {
    CHECK(J_functional(fixed, ScalarField(shape, k)) == doctest::Approx(4 * k).epsilon(1e-15));
    CHECK(I_functional(fixed, ScalarField(shape, k)) == doctest::Approx(4 * k).epsilon(1e-15));
  }
}

TEST_CASE("property: J and I agree between the psi0 form and an explicit chi") {
  std::mt19937_64 rng(101);
  const auto model = mixed_model();
  const GridShape shape = model.shape();
  for (int trial = 0; trial < 5; ++trial) {
    const auto phi = synthesize(shape, random_modes(rng, shape, 3, 0.004));
    // chi recomputed explicitly from H and the combined potential psi0 + phi.
    ScalarField total = model.psi0();
    total += phi;
    FormField chi = complex_hessian(total);
    chi += model.H();
    const auto& g = model.G();
    const auto& x0 = model.chi0();
    double j_ref = 0.0, i_ref = 0.0;
    for (std::size_t i = 0; i < shape.size(); ++i) {
      j_ref += 0.5 * phi[i] * mixed_det(g, x0[i] + chi[i]);
      i_ref += phi[i] * (2 * det(x0[i]) + mixed_det(chi[i], x0[i]) + 2 * det(chi[i])) / 6.0;
    }
    j_ref /= static_cast<double>(shape.size());
    i_ref /= static_cast<double>(shape.size());
    const double j1 = J_functional(model, phi);
    const double j2 = J_functional(model, phi, chi);
    const double i1 = I_functional(model, phi);
    const double i2 = I_functional(model, phi, chi);
    CHECK(std::abs(j1 - j_ref) <= 1e-12);
    CHECK(std::abs(i1 - i_ref) <= 1e-12);
    CHECK(std::abs(j1 - j2) <= 1e-12);
    CHECK(std::abs(i1 - i2) <= 1e-12);
  }
}

TEST_CASE("property: functional gradients are the wedge densities") {
  // d/ds J(phi + s v) = int v omega ^ chi_phi,  d/ds I(phi + s v) = int v chi_phi^2 / 2.
  std::mt19937_64 rng(103);
  const auto model = mixed_model();
  const GridShape shape = model.shape();
  FlowEngine engine(model);
  for (int trial = 0; trial < 5; ++trial) {
    const auto phi = synthesize(shape, random_modes(rng, shape, 3, 0.003));
    const auto v = synthesize(shape, random_modes(rng, shape, 3, 0.01));
    const FormField chi = engine.chi(phi);
    const double s = 1e-4;
    auto shifted = [&](double h) {
      ScalarField p = phi;
      p.axpy(h, v);
      return p;
    };
    const double dJ = (J_functional(model, shifted(s)) - J_functional(model, shifted(-s))) / (2 * s);
    const double dI = (I_functional(model, shifted(s)) - I_functional(model, shifted(-s))) / (2 * s);
    const double gJ = grid_mean(v, chi, [&](double w, const auto& x) { return w * mixed_det(model.G(), x); });
    const double gI = grid_mean(v, chi, [&](double w, const auto& x) { return w * det(x); });
    CHECK(std::abs(dJ - gJ) <= 1e-9);
    CHECK(std::abs(dI - gI) <= 1e-9);
  }
}

TEST_CASE("positivity margin and second-order exponent") {
  // The strict positivity threshold on det = (1 - 3 eps)^2 caps eps at 1/3 - 3.3e-7.
  CHECK(positivity_margin(constant_model()) == doctest::Approx(1.0 / 3.0).epsilon(2e-6));
  const double pi2 = std::numbers::pi * std::numbers::pi;
  CHECK(positivity_margin(standard_model()) ==
        doctest::Approx((1.0 - 0.05 * pi2) / 3.0).epsilon(1e-9));

  CHECK(second_order_exponent(standard_model()) == 0.0);
  const double eps = positivity_margin(standard_model());
  CHECK(second_order_exponent(standard_model(), 2.0) == doctest::Approx(2.0 / eps));

  // omega = 2I, chi0 = 2I (unnormalized, c = 1): chi0 - omega = 0, so no margin.
  const GridShape shape = GridShape::cube(4);
  const auto tight = SurfaceModel::build(shape, HermitianMatrix2::scalar(2.0),
                                         HermitianMatrix2::scalar(2.0), ScalarField(shape));
  CHECK(positivity_margin(tight) == 0.0);
  CHECK(second_order_exponent(tight) == 0.0);
  CHECK_THROWS_AS(second_order_exponent(tight, 1.0), HypothesisError);
}

TEST_CASE("diagnostics at a fixed point") {
  const auto fixed = constant_model();
  FlowEngine engine(fixed);
  const FlowState s = engine.make_state(ScalarField(fixed.shape()));
  const auto r = diagnostics(fixed, s, 0.0);
  CHECK(r.osc_phidot == 0.0);
  CHECK(r.sup_phidot == 0.0);
  CHECK(r.J == 0.0);
  CHECK(r.I == 0.0);
  CHECK(r.sup_lambda_chi_omega == r.inf_lambda_chi_omega);
  CHECK(r.sup_lambda_chi_omega == doctest::Approx(fixed.sup_lambda_chi0_omega()).epsilon(1e-15));
  CHECK(r.sup_lambda_chi_omega == doctest::Approx(1.0).epsilon(1e-15));
  // chi0 = 2I, omega = I: Lambda_omega chi = 4, Q = log 4.
  CHECK(r.sup_lambda_omega_chi == doctest::Approx(4.0));
  CHECK(r.sup_Q == doctest::Approx(std::log(4.0)));
  CHECK(r.min_eig_chi == doctest::Approx(1.0));
  CHECK(weighted_phidot_integral(s) == 0.0);
}

TEST_CASE("diagnostics of the standard model at t = 0") {
  const auto model = standard_model();
  FlowEngine engine(model);
  const FlowState s = engine.make_state(ScalarField(model.shape()));
  const auto r = diagnostics(model, s, 0.5);
  CHECK(r.inf_lambda_chi_omega < 1.0);
  CHECK(r.sup_lambda_chi_omega > 1.0);
  CHECK(r.inf_lambda_chi_omega == model.inf_lambda_chi0_omega());
  CHECK(r.sup_lambda_chi_omega == model.sup_lambda_chi0_omega());
  CHECK(r.osc_phidot == doctest::Approx(0.5 * (r.sup_lambda_chi_omega - r.inf_lambda_chi_omega)));
  CHECK(r.osc_phidot == r.sup_phidot - r.inf_phidot);
  CHECK(r.min_eig_chi > 0.0);
  CHECK(r.sup_abs_phi == 0.0);
  CHECK(std::abs(weighted_phidot_integral(s)) <= 1e-14);
}

TEST_CASE("decay fit examples") {
  std::vector<std::pair<double, double>> exp_series, flat;
  for (int k = 0; k < 40; ++k) {
    const double t = 0.25 * k;
    exp_series.emplace_back(t, 3.0 * std::exp(-2.0 * t));
    flat.emplace_back(t, 0.7);
  }
  const auto a = fit_decay_rate(exp_series);
  CHECK(std::abs(a.eta - 2.0) <= 1e-12);
  CHECK(a.r_squared == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(a.samples_used == 20u);

  const auto b = fit_decay_rate(flat);
  CHECK(b.eta == 0.0);
  CHECK(b.r_squared == 1.0);

  std::vector<std::pair<double, double>> few(exp_series.begin(), exp_series.begin() + 9);
  CHECK_THROWS_AS(fit_decay_rate(few), DiagnosticError);

  // Samples at the floating-point floor are dropped.
  std::vector<std::pair<double, double>> floored = exp_series;
  for (int k = 0; k < 30; ++k) floored.emplace_back(10.0 + k, 1e-16);
  CHECK(std::abs(fit_decay_rate(floored).eta - 2.0) <= 1e-12);

  std::vector<DiagnosticsRecord> recs;
  for (const auto& [t, osc] : exp_series) recs.push_back(record(t, osc, 0.0));
  CHECK(std::abs(fit_decay_rate(recs).eta - 2.0) <= 1e-12);
}

TEST_CASE("invariant monitor flags each inequality") {
  const auto fixed = constant_model();
  SUBCASE("clean series") {
    InvariantMonitor m(fixed);
    m.observe(record(0, 0.1, -0.1), 0.0);
    m.observe(record(1, 0.05, -0.05), 0.0);
    CHECK(m.violations().total() == 0);
    CHECK(m.samples() == 2u);
    CHECK_FALSE(m.first_violation().has_value());
  }
  SUBCASE("max principle") {
    InvariantMonitor m(fixed);
    m.observe(record(0, 0.1, -0.1), 0.0);
    m.observe(record(1, 0.1 + 1e-9, -0.1), 0.0);  // within 1e-8 * 0.2
    CHECK(m.violations().total() == 0);
    m.observe(record(2, 0.2, -0.3), 0.0);
    CHECK(m.violations().sup_phidot_increase == 1);
    CHECK(m.violations().inf_phidot_decrease == 1);
    REQUIRE(m.first_violation().has_value());
    CHECK(m.first_violation()->find("t = 2") != std::string::npos);
  }
  SUBCASE("envelope, I, J, lower bound and zero mean") {
    InvariantMonitor m(fixed);
    auto r = record(0, 0, 0);
    m.observe(r, 0.0);
    r.t = 1;
    r.sup_lambda_chi_omega = 1.0 + 2e-6;
    r.I = 1e-7;
    r.J = 1e-9;
    r.min_eig_chi = -1e-7;
    m.observe(r, 1e-8);
    const auto& v = m.violations();
    CHECK(v.envelope == 1);
    CHECK(v.I_conservation == 1);
    CHECK(v.J_increase == 1);
    CHECK(v.lower_bound == 1);
    CHECK(v.zero_mean == 1);
    CHECK(v.total() == 5);
  }
}

TEST_CASE("series CSV round trips bit for bit") {
  std::mt19937_64 rng(55);
  std::normal_distribution<double> g;
  std::vector<DiagnosticsRecord> series;
  for (int k = 0; k < 25; ++k) {
    DiagnosticsRecord r;
    double* fields[] = {&r.t, &r.sup_phidot, &r.inf_phidot, &r.osc_phidot, &r.J, &r.I,
                        &r.sup_lambda_chi_omega, &r.inf_lambda_chi_omega, &r.sup_lambda_omega_chi,
                        &r.min_eig_chi, &r.sup_abs_phi, &r.sup_Q};
    for (double* f : fields) *f = g(rng) * std::pow(10.0, static_cast<int>(g(rng) * 40));
    series.push_back(r);
  }
  series[0].J = -0.0;
  series[1].I = std::numeric_limits<double>::denorm_min();
  series[2].t = 0.1;

  std::stringstream ss;
  write_series_csv(ss, series);
  CHECK(ss.str().rfind(std::string(kSeriesHeader) + "\n", 0) == 0);
  const auto back = read_series_csv(ss);
  REQUIRE(back.size() == series.size());
  bool same = true;
  for (std::size_t k = 0; k < series.size(); ++k) same = same && back[k] == series[k];
  CHECK(same);
  CHECK(std::signbit(back[0].J));
  CHECK(format_real(0.1) == "0.10000000000000001");
}

TEST_CASE("malformed series CSV is a usage error") {
  std::stringstream bad_header("t,foo\n1,2\n");
  CHECK_THROWS_AS(read_series_csv(bad_header), UsageError);
  std::stringstream bad_row(std::string(kSeriesHeader) + "\n1,2,3\n");
  CHECK_THROWS_AS(read_series_csv(bad_row), UsageError);
  std::stringstream bad_number(std::string(kSeriesHeader) + "\n1,2,3,4,5,6,7,8,9,10,11,x\n");
  CHECK_THROWS_AS(read_series_csv(bad_number), UsageError);
}
