#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "wake/asymptotics.hpp"
#include "wake/errors.hpp"

using namespace wake;

namespace {

constexpr double pi = std::numbers::pi;
constexpr cplx I1{0.0, 1.0};

// composite Simpson on [a, b] with n (even) panels
template <class F>
double simpson(F f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

double value_at_zero(const Slice& f, const Grid& g) {
  const Transform tr(g);
  return physical(f, 0, tr)[g.ny / 2].real();  // y = 0 sits in the middle of [-L, L)
}

}  // namespace

TEST(Profiles, SpotValues) {
  EXPECT_NEAR(f_profile(0, 0.0), 0.28209479177387814, 1e-15);
  EXPECT_NEAR(h_profile(0.0), 1.0 / (4.0 * pi), 1e-12);
  EXPECT_NEAR(g_profile(1, 2.0), 2.0 / (5.0 * pi), 1e-15);
  EXPECT_DOUBLE_EQ(f_profile(1, -1.5), -f_profile(1, 1.5));
}

TEST(Profiles, Masses) {
  const double Z = 40.0;
  EXPECT_NEAR(simpson([](double z) { return f_profile(0, z); }, -Z, Z, 4000), 1.0, 1e-12);
  EXPECT_NEAR(simpson([](double z) { return f_profile(1, z); }, -Z, Z, 4000), 0.0, 1e-14);
  // Cauchy density: numerical core plus the exact arctan tails
  const double core = simpson([](double z) { return g_profile(0, z); }, -Z, Z, 40000);
  const double tails = 2.0 * (0.5 - std::atan(Z) / pi);
  EXPECT_NEAR(core + tails, 1.0, 1e-12);
}

TEST(Profiles, HSolvesItsOrdinaryDifferentialEquation) {
  // h'' + (z/2) h' + h = f0^2 with fourth-order differences
  const double d = 1e-3;
  double worst = 0;
  for (double z = -10.0; z <= 10.0; z += 0.01) {
    const double hm2 = h_profile(z - 2 * d), hm1 = h_profile(z - d), h0 = h_profile(z), hp1 = h_profile(z + d),
                 hp2 = h_profile(z + 2 * d);
    const double d1 = (hm2 - 8 * hm1 + 8 * hp1 - hp2) / (12 * d);
    const double d2 = (-hm2 + 16 * hm1 - 30 * h0 + 16 * hp1 - hp2) / (12 * d * d);
    const double f0 = f_profile(0, z);
    worst = std::max(worst, std::abs(d2 + 0.5 * z * d1 + h0 - f0 * f0));
  }
  EXPECT_LT(worst, 1e-8);
  const double hd = (h_profile(-2 * d) - 8 * h_profile(-d) + 8 * h_profile(d) - h_profile(2 * d)) / (12 * d);
  EXPECT_NEAR(hd, 0.0, 1e-12);
}

TEST(Expansion, ZeroCoefficientsGiveZeroFields) {
  const Grid g = Grid::make(128, 1, 100.0, {20.0});
  const AsymptoticFields f = asymptotic_fields(AsymptoticCoeffs::zero(g), 50.0, g);
  EXPECT_EQ(f.u.max_abs() + f.v.max_abs() + f.w.max_abs(), 0.0);
  EXPECT_THROW(asymptotic_fields(AsymptoticCoeffs::zero(g), 0.0, g), Error);
}

TEST(Expansion, SpotValueOnTheAxis) {
  const Grid g = Grid::make(4096, 0, 400.0, {20.0});
  AsymptoticCoeffs c = AsymptoticCoeffs::zero(g);
  c.a1 = 1.0;
  c.a5 = 1.0;
  c.a4 = 0.0;
  const AsymptoticFields f = asymptotic_fields(c, 100.0, g);
  const double expect = 1.0 / (10.0 * std::sqrt(4.0 * pi)) - h_profile(0.0) / 200.0;
  EXPECT_NEAR(value_at_zero(f.u, g), expect, 1e-12);
}

TEST(Expansion, VorticityIsOddAndMatchesTheProfile) {
  const Grid g = Grid::make(1024, 0, 200.0, {20.0});
  AsymptoticCoeffs c = AsymptoticCoeffs::zero(g);
  c.a1 = 0.7;
  const double x = 30.0;
  const AsymptoticFields f = asymptotic_fields(c, x, g);
  EXPECT_LT(op_S(f.w, g).max_abs(), 1e-14);
  const Transform tr(g);
  const auto w = physical(f.w, 0, tr);
  double worst = 0;
  for (int m = 0; m < g.ny; ++m)
    worst = std::max(worst, std::abs(w[m].real() - c.a1 / (2 * x) * f_profile(1, g.y[m] / std::sqrt(x))));
  EXPECT_LT(worst, 1e-13);
}

TEST(Expansion, PoissonPairIsDivergenceFree) {
  const Grid g = Grid::make(512, 2, 200.0, {20.0});
  AsymptoticCoeffs c = AsymptoticCoeffs::zero(g);
  for (int n = -2; n <= 2; ++n) {
    c.a2[n + 2] = n == 0 ? cplx(-0.4) : (n > 0 ? cplx(0.1, 0.05 * n) : cplx(0.1, 0.05 * n));
    c.a3[n + 2] = n == 0 ? cplx(0.25) : cplx(0.03, -0.02 * n);
  }
  for (int n = 1; n <= 2; ++n) {
    c.a2[-n + 2] = std::conj(c.a2[n + 2]);
    c.a3[-n + 2] = std::conj(c.a3[n + 2]);
  }
  const double x = 10.0, d = 1e-2;
  auto u_at = [&](double xx) { return asymptotic_fields(c, xx, g).u; };
  const Slice dudx = (1.0 / (12.0 * d)) * (u_at(x - 2 * d) - 8.0 * u_at(x - d) + 8.0 * u_at(x + d) - u_at(x + 2 * d));
  const Slice dvdy = deriv_y(asymptotic_fields(c, x, g).v, g);
  EXPECT_LT((dudx + dvdy).max_abs(), 1e-10);
}

TEST(Extraction, OddJumpOfAPoissonProfile) {
  // quadratic extrapolation of -0.2 i e^{-|k| x0} from dk, 2dk, 3dk errs by 0.2 (dk x0)^3 at leading order
  auto error = [](double L) {
    const Grid g = Grid::make(2048, 0, L, {20.0});
    Slice f(g);
    for (int i = 0; i < g.ny; ++i) {
      if (i == g.nyquist()) continue;
      const double k = g.k[i], s = k > 0 ? 1.0 : (k < 0 ? -1.0 : 0.0);
      f(0, i) = std::exp(-std::abs(k) * 20.0) * (0.3 - 0.2 * I1 * s) + I1 * k * std::exp(-k * k * 20.0);
    }
    return std::abs(odd_jump(f.mode(0), g) - (-0.2 * I1));
  };
  const double dk = pi / 2000.0;
  const double e1 = error(2000.0), e2 = error(4000.0);
  EXPECT_LT(e1, 0.2 * std::pow(dk * 20.0, 3));
  EXPECT_NEAR(e1 / e2, 8.0, 0.5);  // third order
}

TEST(Extraction, ZeroStateGivesZeroCoefficients) {
  Params prm;
  const Grid g = Grid::make(128, 1, 200.0, log_stations(20.0, 400.0, 12));
  const DuhamelMap map(g, prm);
  const BoundaryData b(g);
  const FlowState s = picard_solve(b, map);
  const AsymptoticCoeffs c = extract_coeffs(b, s, map);
  EXPECT_EQ(c.a1, 0.0);
  EXPECT_EQ(std::abs(c.a2_mode(0)) + std::abs(c.a3_mode(0)) + std::abs(c.a2_mode(1)), 0.0);
  EXPECT_EQ(c.a5 + c.a6 + c.a4_pieces.sum(), 0.0);
}

TEST(Extraction, LinearRegime) {
  Params prm;
  prm.nonlinear = false;
  prm.strouhal = 2.0;
  // wide enough that e^{-L^2 / 4 Xmax} is below round-off
  const Grid g = Grid::make(1024, 1, 800.0, log_stations(20.0, 2000.0, 60));
  const DuhamelMap map(g, prm);
  const BoundaryData b = make_boundary(BoundaryFamily::gaussian_wake, 0.01, 3, g, prm);
  const FlowState s = picard_solve(b, map);
  const AsymptoticCoeffs c = extract_coeffs(b, s, map);
  const double mi = op_I(op_P0(b.w), g)(0, 0).real();
  EXPECT_EQ(c.a1, -mi);
  EXPECT_EQ(c.q_integral, 0.0);
  // the stationary mass of u is a1 + P0 a2 at every station
  for (int j = 0; j < g.nx; ++j) EXPECT_NEAR(s.u[j](0, 0).real(), c.a1 + c.a2_mode(0).real(), 1e-12);
  EXPECT_DOUBLE_EQ(c.a5, c.a1 * c.a1);
  // only the boundary piece of a4 survives, and the fit must find it
  EXPECT_EQ(c.a4_pieces.uv + c.a4_pieces.q, 0.0);
  EXPECT_NEAR(c.a4, c.a4_pieces.w, 1e-3 * std::abs(c.a4_pieces.w));
  // the diagnostic is constant and equals -a1
  const A1Diagnostic d = a1_diagnostic(s, map);
  EXPECT_LT(d.variation, 1e-10);
  EXPECT_NEAR(d.mean, -c.a1, 1e-12);
  EXPECT_LT(d.cross_defect, 1e-12);
}

TEST(Extraction, SymmetricWakeHasNoA3) {
  Params prm;
  prm.strouhal = 2.0;
  const Grid g = Grid::make(256, 1, 400.0, log_stations(20.0, 400.0, 24));
  const DuhamelMap map(g, prm);
  const BoundaryData b = make_boundary(BoundaryFamily::symmetric_wake, 0.01, 5, g, prm);
  const FlowState s = picard_solve(b, map);
  const AsymptoticCoeffs c = extract_coeffs(b, s, map);
  for (int n = -1; n <= 1; ++n) EXPECT_LT(std::abs(c.a3_mode(n)), 1e-10);
  EXPECT_EQ(c.a6, 0.0);
}

TEST(Extraction, NonlinearDiagnosticIsAlmostLocal) {
  Params prm;
  prm.strouhal = 2.0;
  const Grid g = Grid::make(512, 1, 400.0, log_stations(20.0, 2000.0, 80));
  const DuhamelMap map(g, prm);
  const BoundaryData b = make_boundary(BoundaryFamily::gaussian_wake, 0.01, 7, g, prm);
  const FlowState s = picard_solve(b, map);
  const AsymptoticCoeffs c = extract_coeffs(b, s, map);
  EXPECT_GT(std::abs(c.q_integral), 0.0);
  const A1Diagnostic d = a1_diagnostic(s, map);
  EXPECT_LT(d.variation, 1e-2);
  EXPECT_LT(d.cross_defect, 1e-2);
  EXPECT_NEAR(d.mean, -c.a1, 1e-2 * std::abs(c.a1));
}

TEST(DecayFit, ExactExpansionIsDegenerate) {
  Params prm;
  const Grid g = Grid::make(256, 0, 400.0, log_stations(20.0, 2000.0, 30));
  AsymptoticCoeffs c = AsymptoticCoeffs::zero(g);
  c.a1 = 0.2;
  c.a2[0] = -0.1;
  c.a5 = 0.04;
  FlowState s(g);
  for (int j = 0; j < g.nx; ++j) {
    const AsymptoticFields f = asymptotic_fields(c, g.x[j] - g.x[0] + (j == 0 ? 1e-9 : 0.0), g);
    s.u[j] = f.u;
    s.v[j] = f.v;
    s.w[j] = f.w;
  }
  const DecayFit d = decay_fit(s, c, g, prm, 80.0, 2000.0);
  EXPECT_TRUE(d.degenerate);
  EXPECT_THROW(decay_fit(s, c, g, prm, 1900.0, 1950.0), Error);
}

TEST(DecayFit, SyntheticResidualSlope) {
  // w = w_a + x^{-3/2} f0(y/sqrt x)/sqrt x: sup norm exactly ~ x^{-2}
  Params prm;
  const Grid g = Grid::make(1024, 0, 2000.0, log_stations(20.0, 2000.0, 40));
  AsymptoticCoeffs c = AsymptoticCoeffs::zero(g);
  c.a1 = 0.2;
  FlowState s(g);
  for (int j = 1; j < g.nx; ++j) {
    const double x = g.x[j], xi = x - g.x[0];
    const AsymptoticFields f = asymptotic_fields(c, xi, g);
    s.u[j] = f.u;
    s.v[j] = f.v;
    s.w[j] = f.w;
    for (int i = 0; i < g.ny; ++i)
      if (i != g.nyquist()) s.w[j](0, i) += 0.05 * std::pow(x, -1.5) * std::exp(-g.k[i] * g.k[i] * x);
  }
  const DecayFit d = decay_fit(s, c, g, prm, 80.0, 2000.0);
  EXPECT_FALSE(d.degenerate);
  EXPECT_NEAR(d.w_inf, -2.0, 0.02);
  EXPECT_NEAR(d.w_1, -1.5, 0.02);
}

TEST(ShiftCheck, ZeroOffsetAndEnvelopeExponents) {
  const Grid g = Grid::make(8192, 0, 20000.0, {20.0});
  AsymptoticCoeffs c = AsymptoticCoeffs::zero(g);
  c.a1 = 0.15;
  c.a2[0] = -0.08;
  c.a5 = c.a1 * c.a1;
  std::vector<double> xs;
  for (int i = 0; i <= 20; ++i) xs.push_back(40.0 * std::pow(50.0, i / 20.0));  // [2 x0, 100 x0]
  const ShiftCheck zero = shift_equivalence_check(c, 0.0, xs, g);
  for (double d : zero.u_defect) EXPECT_EQ(d, 0.0);
  const ShiftCheck r = shift_equivalence_check(c, 20.0, xs, g);
  // bounds, not equalities: slopes at most the envelope exponents, envelope ratios bounded
  EXPECT_LE(r.heat_slope, -1.5 + 0.05);
  EXPECT_LE(r.poisson_slope, -2.0 + 0.05);
  EXPECT_LE(r.u_slope, r.u_lead_slope - 1.0 + 0.05);
  double heat_max = 0, poisson_max = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    heat_max = std::max(heat_max, r.heat_defect[i] * std::pow(xs[i], 1.5) / 20.0);
    poisson_max = std::max(poisson_max, r.poisson_defect[i] * xs[i] * xs[i] / 20.0);
  }
  EXPECT_LT(heat_max, 1.0);
  EXPECT_LT(poisson_max, 1.0);
  EXPECT_LT(r.max_ratio, 10.0);
}
