#include "wake/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "wake/errors.hpp"

namespace wake {

namespace {

constexpr cplx I1{0.0, 1.0};
constexpr double pi = std::numbers::pi;

double sgn(double k) { return k > 0 ? 1.0 : (k < 0 ? -1.0 : 0.0); }

double sup_all(const Slice& f, const Transform& tr) {
  double s = 0;
  for (int n = -f.nt(); n <= f.nt(); ++n) s += lp_norm(physical(f, n, tr), INFINITY, 0.0);
  return s;
}

double l1_all(const Slice& f, const Transform& tr, double dy) {
  double s = 0;
  for (int n = -f.nt(); n <= f.nt(); ++n) s += lp_norm(physical(f, n, tr), 1.0, dy);
  return s;
}

// log-log slope over the given stations; NaN when nothing can be fitted (a vanishing series)
double slope(const std::vector<double>& x, const std::vector<double>& v) {
  if (x.size() < 2 || std::any_of(v.begin(), v.end(), [](double a) { return !(a > 0); }))
    return std::numeric_limits<double>::quiet_NaN();
  return -fit_decay_exponent(x, v, x.front());
}

// trapezoid of m over x plus a power tail m(X) X / (alpha - 1); ok = false if no tail applies
double integrate_with_tail(const std::vector<double>& x, const std::vector<double>& m, double* tail, bool* ok) {
  double s = 0;
  for (std::size_t i = 1; i < x.size(); ++i) s += 0.5 * (x[i] - x[i - 1]) * (m[i] + m[i - 1]);
  *tail = 0;
  *ok = true;
  const double X = x.back(), last = m.back();
  if (last == 0.0) return s;
  std::vector<double> mag(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (x[i] >= X / 10 && m[i] * last <= 0) {
      *ok = false;
      return s;
    }
    mag[i] = std::abs(m[i]);
  }
  const double alpha = fit_decay_exponent(x, mag, X / 10);
  if (alpha <= 1.0) {
    *ok = false;
    return s;
  }
  *tail = last * X / (alpha - 1.0);
  return s + *tail;
}

}  // namespace

// ============================================================================
// profiles
// ============================================================================

double f_profile(int m, double z) { return std::pow(z, m) * std::exp(-0.25 * z * z) / std::sqrt(4.0 * pi); }

double g_profile(int m, double z) { return std::pow(z, m) / (pi * (1.0 + z * z)); }

double h_profile(double z) {
  const double f0 = f_profile(0, z);
  return f0 * f0 + z * std::erf(0.5 * z) * std::exp(-0.25 * z * z) / (8.0 * std::sqrt(pi));
}

// ============================================================================
// expansion
// ============================================================================

AsymptoticCoeffs AsymptoticCoeffs::zero(const Grid& g) {
  AsymptoticCoeffs c;
  c.a2.assign(g.modes(), 0.0);
  c.a3.assign(g.modes(), 0.0);
  return c;
}

AsymptoticFields asymptotic_fields(const AsymptoticCoeffs& c, double x, const Grid& g, Expansion order) {
  if (!(x > 0)) throw precondition("Domain", "expansion evaluated at x <= 0");
  AsymptoticFields f{Slice(g), Slice(g), Slice(g)};
  const bool full = order == Expansion::full;
  const double a4 = std::isfinite(c.a4) ? c.a4 : 0.0;
  const double drift = c.a6 * std::log(x) + a4;
  for (int i = 0; i < g.ny; ++i) {
    if (i == g.nyquist()) continue;
    const double k = g.k[i], s = sgn(k);
    const double eh = std::exp(-k * k * x), ep = std::exp(-std::abs(k) * x);
    const cplx ik = I1 * k;
    f.w(0, i) = c.a1 * ik * eh;
    f.u(0, i) = c.a1 * eh;
    f.v(0, i) = c.a1 * ik * eh;
    if (!full) continue;
    f.u(0, i) -= drift * ik * eh;
    for (int n = -g.nt; n <= g.nt; ++n) {
      const cplx a2 = c.a2_mode(n), a3 = c.a3_mode(n);
      f.u(n, i) += ep * (a2 - a3 * I1 * s);
      f.v(n, i) += ep * (a2 * I1 * s + a3);
    }
  }
  if (full && c.a5 != 0.0) {
    // the h term lives on the parabolic scale; sample it and transform
    const Transform tr(g);
    std::vector<cplx> hy(g.ny);
    const double r = std::sqrt(x);
    for (int m = 0; m < g.ny; ++m) hy[m] = h_profile(g.y[m] / r);
    const std::vector<cplx> hk = tr.to_k(hy);
    const double fac = c.a5 / (2.0 * x);
    for (int i = 0; i < g.ny; ++i)
      if (i != g.nyquist()) f.u(0, i) -= fac * hk[i];
  }
  return f;
}

cplx odd_jump(const cplx* f, const Grid& g) {
  if (g.ny < 8) throw precondition("Grid", "odd_jump needs at least 8 points");
  cplx d[4];
  for (int m = 1; m <= 3; ++m) d[m] = 0.5 * (f[g.slot(m)] - f[g.slot(-m)]);
  return 3.0 * d[1] - 3.0 * d[2] + d[3];
}

AsymptoticCoeffs extract_coeffs(const BoundaryData& b, const FlowState& s, const DuhamelMap& map) {
  const Grid& g = map.grid();
  const Params& prm = map.params();
  const int nx = g.nx, nt = g.nt;
  const double x0 = g.x.front();
  AsymptoticCoeffs c = AsymptoticCoeffs::zero(g);

  const QuadFields src = map.sources(s);
  const Slice ipw = op_I(op_P0(b.w), g, prm.mean_tol);
  const double m_ipw = ipw(0, 0).real();

  QIntegral qi;
  qi.cumulative.assign(nx, 0.0);
  if (prm.nonlinear) qi = cumulative_Q_integral(src.Q, src.S[0], g);
  c.q_integral = qi.total;
  c.q_integral_defect = qi.defect;

  // heat-scale mass of u: the k -> 0 limit of Lu w, plus the Q mass
  c.a1 = -m_ipw + qi.total;
  for (int n = -nt; n <= nt; ++n) {
    c.a2[n + nt] = b.nu(n, 0) - (n == 0 ? qi.total : 0.0);
    c.a3[n + nt] = I1 * odd_jump(b.nu.mode(n), g);
  }
  c.a2[nt] = c.a2[nt].real();
  c.a3[nt] = c.a3[nt].real();
  const double a3_0 = c.a3[nt].real();
  c.a5 = c.a1 * c.a1;
  c.a6 = -c.a1 * a3_0 / pi;

  A4Pieces& pc = c.a4_pieces;
  pc.w = moment_y(ipw, g)[nt].real();
  pc.uv = -src.R[0](0, 0).real();
  if (prm.nonlinear) {
    std::vector<double> m(nx);
    for (int j = 0; j < nx; ++j) m[j] = moment_y(src.Q[j], g)[nt].real() - c.a1 * a3_0 / (pi * g.x[j]);
    pc.q = -integrate_with_tail(g.x, m, &pc.q_tail, &pc.q_tail_ok);
    pc.q_tail = -pc.q_tail;
  }
  pc.log = -c.a6 * std::log(x0);

  // projection of the remaining stationary residual on -ik e^{-k^2 xi} at every station,
  // extrapolated in 1/xi
  AsymptoticCoeffs cf = c;
  cf.a4 = 0.0;
  std::vector<double> xi, cj;
  for (int j = 0; j < nx; ++j) {
    const double d = g.x[j] - x0;
    if (g.x[j] < 4.0 * x0) continue;
    const AsymptoticFields fa = asymptotic_fields(cf, d, g);
    double num = 0, den = 0;
    for (int i = 0; i < g.ny; ++i) {
      if (i == g.nyquist()) continue;
      const cplx phi = -I1 * g.k[i] * std::exp(-g.k[i] * g.k[i] * d);
      const cplx r = s.u[j](0, i) - fa.u(0, i);
      num += (std::conj(phi) * r).real();
      den += std::norm(phi);
    }
    if (den > 0) {
      xi.push_back(d);
      cj.push_back(num / den);
    }
  }
  if (xi.size() >= 4) {
    // c_j = a4 + b / xi + c / xi^2 in the least-squares sense
    double A[3][3] = {}, r[3] = {};
    for (std::size_t i = 0; i < xi.size(); ++i) {
      const double t[3] = {1.0, 1.0 / xi[i], 1.0 / (xi[i] * xi[i])};
      for (int p = 0; p < 3; ++p) {
        r[p] += t[p] * cj[i];
        for (int q = 0; q < 3; ++q) A[p][q] += t[p] * t[q];
      }
    }
    // Cramer's rule on the 3x3 normal equations
    auto det = [](const double M[3][3]) {
      return M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1]) - M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0]) +
             M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0]);
    };
    double M0[3][3];
    for (int p = 0; p < 3; ++p) {
      M0[p][0] = r[p];
      M0[p][1] = A[p][1];
      M0[p][2] = A[p][2];
    }
    c.a4 = det(M0) / det(A);
  } else if (!xi.empty()) {
    c.a4 = cj.back();
  } else {
    c.a4 = std::numeric_limits<double>::quiet_NaN();
  }
  c.a4_discrepancy = std::abs(c.a4 - pc.sum());

  c.mass_relation = c.a1 + 2.0 * c.a2[nt].real();
  for (int n = -nt; n <= nt; ++n) {
    if (n == 0) continue;
    c.a2_time_variation += std::abs(c.a2[n + nt]);
    c.a3_time_variation += std::abs(c.a3[n + nt]);
  }
  return c;
}

// ============================================================================
// diagnostics
// ============================================================================

A1Diagnostic a1_diagnostic(const FlowState& s, const DuhamelMap& map) {
  const Grid& g = map.grid();
  const Params& prm = map.params();
  const int nx = g.nx, ny = g.ny;
  const double X = g.x.back();
  A1Diagnostic r;
  r.a1_tilde.assign(nx, 0.0);
  r.a1_tilde_alt.assign(nx, 0.0);

  const QuadFields src = map.sources(s);
  QIntegral qi;
  qi.cumulative.assign(nx, 0.0);
  if (prm.nonlinear) qi = cumulative_Q_integral(src.Q, src.S[0], g);
  const double alphaP = prm.nonlinear ? tail_exponents(src.P, g)[g.nt] : 0.0;

  std::vector<PanelWeights> wts(nx);
  for (int j = 1; j < nx; ++j) wts[j] = panel_weights(-1.0, g.x[j] - g.x[j - 1]);

  // E_P(x) = int_x^inf e^{x - x~} P0 P(x~) dx~, per wavenumber
  std::vector<std::vector<cplx>> EP(nx, std::vector<cplx>(ny, 0.0));
  if (prm.nonlinear) {
    for (int i = 0; i < ny; ++i) {
      if (i == g.nyquist()) continue;
      const cplx last = src.P[nx - 1](0, i);
      EP[nx - 1][i] = last == 0.0 ? cplx(0.0) : last * X * power_tail_integral(-X, alphaP, prm.window_tol);
      for (int j = nx - 2; j >= 0; --j)
        EP[j][i] = wts[j + 1].e * EP[j + 1][i] + wts[j + 1].a * src.P[j](0, i) + wts[j + 1].b * src.P[j + 1](0, i);
    }
  }
  // same window on the station masses of P0 Q
  std::vector<double> EQ(nx, 0.0);
  if (prm.nonlinear) {
    const double last = src.Q[nx - 1](0, 0).real();
    EQ[nx - 1] = last == 0.0 ? 0.0 : last * X * power_tail_integral(-X, qi.alpha, prm.window_tol).real();
    for (int j = nx - 2; j >= 0; --j)
      EQ[j] = (wts[j + 1].e * EQ[j + 1] + wts[j + 1].a * src.Q[j](0, 0).real() + wts[j + 1].b * src.Q[j + 1](0, 0).real()).real();
  }

  const Transform tr(g);
  for (int j = 0; j < nx; ++j) {
    Slice arg(g);
    for (int i = 0; i < ny; ++i) arg(0, i) = s.w[j](0, i) + EP[j][i];
    // the combination has zero mean; what is left is quadrature and iteration error
    const double l1 = lp_norm(physical(arg, 0, tr), 1.0, g.dy);
    const double md = l1 > 0 ? std::abs(arg(0, 0)) / l1 : 0.0;
    r.mean_defect = std::max(r.mean_defect, md);
    if (md > 1e-8) throw precondition("NonZeroMean", "I-argument of the a1 diagnostic has mean " + std::to_string(md));
    arg(0, 0) = 0.0;
    const double mi = op_I(arg, g, prm.mean_tol)(0, 0).real();
    const double tq = qi.total - qi.cumulative[j];
    r.a1_tilde[j] = mi + EQ[j] - tq;
    r.a1_tilde_alt[j] = mi + EQ[j] + src.S[j](0, 0).real();
  }

  double sum = 0;
  for (double a : r.a1_tilde) sum += a;
  r.mean = sum / nx;
  const double den = std::abs(r.mean);
  for (int j = 0; j < nx; ++j) {
    const double dv = std::abs(r.a1_tilde[j] - r.mean), dc = std::abs(r.a1_tilde[j] - r.a1_tilde_alt[j]);
    r.variation = std::max(r.variation, den > 0 ? dv / den : dv);
    r.cross_defect = std::max(r.cross_defect, den > 0 ? dc / den : dc);
  }
  return r;
}

DecayFit decay_fit(const FlowState& s, const AsymptoticCoeffs& c, const Grid& g, const Params& prm, double from,
                   double to) {
  const double x0 = g.x.front(), phi0 = prm.phi0(), beta = prm.beta;
  const Transform tr(g);
  DecayFit d;
  d.pred_u = -9.0 / 8.0 + phi0;
  d.pred_v = -1.5 + phi0;
  d.pred_w_inf = -1.5 + phi0;
  d.pred_w_1 = -1.0 + phi0;
  d.pred_u_first = -1.0 + phi0;
  ResidualNorms& nr = d.norms;
  double field = 0, resid = 0;
  for (int j = 0; j < g.nx; ++j) {
    const double x = g.x[j];
    if (x < from || x > to) continue;
    const double xi = x - x0;
    const AsymptoticFields fa = asymptotic_fields(c, xi, g), f1 = asymptotic_fields(c, xi, g, Expansion::first);
    const Slice du = s.u[j] - fa.u, dv = s.v[j] - fa.v, dw = s.w[j] - fa.w, du1 = s.u[j] - f1.u;
    nr.x.push_back(x);
    nr.u_inf.push_back(sup_all(du, tr));
    nr.v_inf.push_back(sup_all(dv, tr));
    nr.w_inf.push_back(sup_all(dw, tr));
    nr.w_1.push_back(l1_all(dw, tr, g.dy));
    double wt = 0;
    for (int n = -g.nt; n <= g.nt; ++n) wt += lp_norm_weighted(physical(dw, n, tr), g.y, beta, 2.0, g.dy);
    nr.w_weighted.push_back(std::pow(jb(x), -0.5 * beta - 0.25) * wt);
    nr.u_first.push_back(sup_all(du1, tr));
    field = std::max({field, sup_all(s.u[j], tr), sup_all(s.v[j], tr), sup_all(s.w[j], tr)});
    resid = std::max({resid, nr.u_inf.back(), nr.v_inf.back(), nr.w_inf.back()});
  }
  if (nr.x.size() < 2) throw precondition("Range", "fewer than two stations in the decay-fit window");
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (resid <= 1e-12 * field) {
    d.degenerate = true;
    d.u_inf = d.v_inf = d.w_inf = d.w_1 = d.w_weighted = nan;
    const bool first_zero = *std::max_element(nr.u_first.begin(), nr.u_first.end()) <= 1e-12 * field;
    d.u_first = first_zero ? nan : slope(nr.x, nr.u_first);
    return d;
  }
  d.u_inf = slope(nr.x, nr.u_inf);
  d.v_inf = slope(nr.x, nr.v_inf);
  d.w_inf = slope(nr.x, nr.w_inf);
  d.w_1 = slope(nr.x, nr.w_1);
  d.w_weighted = slope(nr.x, nr.w_weighted);
  d.u_first = slope(nr.x, nr.u_first);
  return d;
}

ShiftCheck shift_equivalence_check(const AsymptoticCoeffs& c, double x0, const std::vector<double>& xs,
                                   const Grid& g) {
  const Transform tr(g);
  ShiftCheck r;
  for (double x : xs) {
    if (x - x0 <= 0) throw precondition("Range", "shift check needs x > x0");
    const AsymptoticFields a = asymptotic_fields(c, x - x0, g), b = asymptotic_fields(c, x, g);
    Slice kc(g), k0(g);
    for (int i = 0; i < g.ny; ++i) {
      if (i == g.nyquist()) continue;
      const double k = g.k[i];
      kc(0, i) = std::exp(-k * k * (x - x0)) - std::exp(-k * k * x);
      k0(0, i) = std::exp(-std::abs(k) * (x - x0)) - std::exp(-std::abs(k) * x);
    }
    r.x.push_back(x);
    r.u_defect.push_back(sup_all(a.u - b.u, tr));
    r.heat_defect.push_back(sup_all(kc, tr));
    r.poisson_defect.push_back(sup_all(k0, tr));
    if (x0 > 0 && c.a1 != 0.0)
      r.max_ratio = std::max(r.max_ratio, r.u_defect.back() * x / (x0 * std::abs(c.a1) / std::sqrt(x)));
  }
  auto fit = [&](const std::vector<double>& v) {
    return *std::max_element(v.begin(), v.end()) > 0 ? slope(r.x, v) : 0.0;
  };
  if (r.x.size() >= 2) {
    r.u_slope = fit(r.u_defect);
    r.heat_slope = fit(r.heat_defect);
    r.poisson_slope = fit(r.poisson_defect);
  }
  return r;
}

}  // namespace wake
