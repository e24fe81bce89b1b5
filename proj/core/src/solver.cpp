#include "wake/solver.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "wake/errors.hpp"

namespace wake {

namespace {

constexpr cplx I1{0.0, 1.0};

double mode_l2(const Slice& f, int n) {
  double s = 0;
  const cplx* c = f.mode(n);
  for (int i = 0; i < f.ny(); ++i) s += std::norm(c[i]);
  return std::sqrt(s);
}

}  // namespace

std::vector<double> tail_exponents(const std::vector<Slice>& f, const Grid& g) {
  std::vector<double> alpha(g.modes(), 0.0);
  const double X = g.x.back();
  double from = X / 10;
  if (g.nx >= 2 && std::count_if(g.x.begin(), g.x.end(), [&](double x) { return x >= from; }) < 2)
    from = g.x[g.nx - 2];
  for (int n = -g.nt; n <= g.nt; ++n) {
    std::vector<double> v(g.nx);
    for (int j = 0; j < g.nx; ++j) v[j] = mode_l2(f[j], n);
    if (v.back() == 0.0 || g.nx < 2) continue;
    alpha[n + g.nt] = fit_decay_exponent(g.x, v, from);
  }
  return alpha;
}

PanelWeights panel_weights(cplx lam, double h) {
  const cplx z = lam * h;
  cplx p0, p1;  // phi0 / h, phi1 / h^2
  const cplx e = std::exp(z);
  if (std::abs(z) < 0.5) {
    cplx t = 1.0;  // z^m / m!
    p0 = 0.0;
    p1 = 0.0;
    for (int m = 0; m < 30; ++m) {
      p0 += t / double(m + 1);
      p1 += t / double(m + 2);
      t *= z / double(m + 1);
      if (std::abs(t) < 1e-18) break;
    }
  } else {
    p0 = (e - 1.0) / z;
    p1 = e / z - (e - 1.0) / (z * z);
  }
  return {e, h * (p0 - p1), h * p1};
}

// ============================================================================
// boundary data
// ============================================================================

void BoundaryData::sync_mu(const Grid& g) { mu = op_hilbert(nu, g); }

double boundary_norm(const BoundaryData& b, const Grid& g, const Params& prm) {
  const Transform tr(g);
  return composite_norm(b.nu, b.mu, b.w, g, tr, prm, prm.x0).total();
}

void check_boundary(const BoundaryData& b, const Grid& g, const Params& prm) {
  if (!b.w.finite() || !b.nu.finite() || !b.mu.finite()) throw precondition("Boundary", "non-finite data");
  const Slice hn = op_hilbert(b.nu, g);
  const double scale = std::max(b.mu.max_abs(), 1e-300);
  if ((hn - b.mu).max_abs() > 1e-12 * scale) throw precondition("Boundary", "mu differs from H nu");
  op_I(op_P0(b.w), g, prm.mean_tol);  // NonZeroMean if the class condition fails
  const double nrm = boundary_norm(b, g, prm);
  if (nrm > prm.rho) throw precondition("Boundary", "boundary norm exceeds rho");
}

// ============================================================================
// Duhamel map
// ============================================================================

DuhamelMap::DuhamelMap(const Grid& g, const Params& prm) : g_(g), prm_(prm) {
  dec_.resize(static_cast<std::size_t>(g.modes()) * g.ny);
  for (int n = -g.nt; n <= g.nt; ++n)
    for (int i = 0; i < g.ny; ++i) dec_[static_cast<std::size_t>(n + g.nt) * g.ny + i] = decompose(g.k[i], n * prm.strouhal);
}

QuadFields DuhamelMap::sources(const FlowState& s) const {
  if (!prm_.nonlinear) return QuadFields(g_);
  return compute_quads(s.u, s.v, s.w, g_);
}

FlowState DuhamelMap::linear(const BoundaryData& b) const {
  FlowState out(g_);
  integrate(&b, nullptr, out, nullptr);
  return out;
}

FlowState DuhamelMap::apply(const BoundaryData& b, const QuadFields& src) const {
  FlowState out(g_);
  integrate(&b, &src, out, nullptr);
  return out;
}

FlowState DuhamelMap::operator()(const BoundaryData& b, const FlowState& s) const { return apply(b, sources(s)); }

DuhamelMap::BoundaryTerms DuhamelMap::boundary_terms(const QuadFields& src) const {
  FlowState scratch(g_);
  BoundaryTerms bt{Slice(g_), Slice(g_), Slice(g_)};
  integrate(nullptr, &src, scratch, &bt);
  return bt;
}

void DuhamelMap::integrate(const BoundaryData* b, const QuadFields* src, FlowState& out, BoundaryTerms* bt) const {
  const int nx = g_.nx;
  const double x0 = g_.x.front(), X = g_.x.back();
  const double S = prm_.strouhal;

  Slice luw(g_), lvw(g_);
  if (b) {
    luw = multiplier_L(MultiplierId::Lu, b->w, g_, S, prm_.mean_tol);
    lvw = multiplier_L(MultiplierId::Lv, b->w, g_, S, prm_.mean_tol);
  }
  const bool have_src = src && src->stations() == nx;
  if (have_src) {
    tail_.P = tail_exponents(src->P, g_);
    tail_.Q = tail_exponents(src->Q, g_);
  } else {
    tail_.P.assign(g_.modes(), 0.0);
    tail_.Q.assign(g_.modes(), 0.0);
  }

  // per-(n, k) work buffers; index [source][station] with source 0 = P, 1 = Q
  std::vector<cplx> f[2], Eh[2], Ep[2], Bh[2], Bp[2];
  for (int s = 0; s < 2; ++s) {
    f[s].resize(nx);
    Eh[s].resize(nx);
    Ep[s].resize(nx);
    Bh[s].resize(nx);
    Bp[s].resize(nx);
  }
  std::vector<PanelWeights> wh(nx), wp(nx), wu(nx);

  for (int n = -g_.nt; n <= g_.nt; ++n) {
    const double aP = tail_.P[n + g_.nt], aQ = tail_.Q[n + g_.nt];
    for (int i = 0; i < g_.ny; ++i) {
      if (i == g_.nyquist()) continue;
      const CompositeDecomp& D = dec(n, i);
      const cplx lm = D.d.lm, mu_up = -D.d.lp;
      const double ak = D.absk;

      if (have_src) {
        for (int j = 1; j < nx; ++j) {
          const double h = g_.x[j] - g_.x[j - 1];
          wh[j] = panel_weights(lm, h);
          wp[j] = panel_weights(cplx(-ak), h);
          wu[j] = panel_weights(mu_up, h);
        }
        for (int j = 0; j < nx; ++j) {
          f[0][j] = src->P[j](n, i);
          f[1][j] = src->Q[j](n, i);
        }
        const double alpha[2] = {aP, aQ};
        for (int s = 0; s < 2; ++s) {
          const auto& fs = f[s];
          // downstream: int_{x0}^{x} e^{lam (x - x~)} f(x~) dx~
          Eh[s][0] = Ep[s][0] = 0.0;
          for (int j = 1; j < nx; ++j) {
            Eh[s][j] = wh[j].e * Eh[s][j - 1] + wh[j].a * fs[j] + wh[j].b * fs[j - 1];
            Ep[s][j] = wp[j].e * Ep[s][j - 1] + wp[j].a * fs[j] + wp[j].b * fs[j - 1];
          }
          // upstream: int_x^inf e^{mu (x~ - x)} f(x~) dx~, power-law continuation past X
          const cplx last = fs[nx - 1];
          if (last != 0.0) {
            Bh[s][nx - 1] = last * X * power_tail_integral(mu_up * X, alpha[s], prm_.window_tol);
            // the Poisson tail is only needed where some field uses it
            const bool used = D.up[0][s].poisson != 0.0 || D.up[1][s].poisson != 0.0 || D.up[2][s].poisson != 0.0;
            Bp[s][nx - 1] = used ? last * X * power_tail_integral(cplx(-ak * X), alpha[s], prm_.window_tol) : 0.0;
          } else {
            Bh[s][nx - 1] = Bp[s][nx - 1] = 0.0;
          }
          for (int j = nx - 2; j >= 0; --j) {
            Bh[s][j] = wu[j + 1].e * Bh[s][j + 1] + wu[j + 1].a * fs[j] + wu[j + 1].b * fs[j + 1];
            Bp[s][j] = wp[j + 1].e * Bp[s][j + 1] + wp[j + 1].a * fs[j] + wp[j + 1].b * fs[j + 1];
          }
        }
      }

      for (int j = 0; j < nx; ++j) {
        cplx acc[3] = {0.0, 0.0, 0.0};
        if (have_src) {
          for (int fld = 0; fld < 3; ++fld)
            for (int s = 0; s < 2; ++s)
              acc[fld] += D.down[fld][s].heat * Eh[s][j] + D.down[fld][s].poisson * Ep[s][j] +
                          D.up[fld][s].heat * Bh[s][j] + D.up[fld][s].poisson * Bp[s][j];
          const cplx R = src->R[j](n, i), Sx = src->S[j](n, i);
          acc[1] += D.L1 * Sx - D.L2 * R;
          acc[2] += -D.L1 * R - D.L2 * Sx;
        }
        if (bt && j == 0) {
          bt->w(n, i) = acc[0];
          bt->u(n, i) = acc[1];
          bt->v(n, i) = acc[2];
        }
        if (b) {
          const double s0 = g_.x[j] - x0;
          const cplx eh = std::exp(lm * s0);
          const double ep = std::exp(-ak * s0);
          acc[0] += eh * b->w(n, i);
          acc[1] += eh * luw(n, i) + ep * b->nu(n, i);
          acc[2] += eh * lvw(n, i) + ep * b->mu(n, i);
        }
        out.w[j](n, i) = acc[0];
        out.u[j](n, i) = acc[1];
        out.v[j](n, i) = acc[2];
      }
    }
  }
  for (int j = 0; j < nx; ++j) {
    enforce_reality(out.u[j], g_);
    enforce_reality(out.v[j], g_);
    enforce_reality(out.w[j], g_);
  }
}

FlowState duhamel_map(const BoundaryData& b, const FlowState& s, const Grid& g, const Params& prm) {
  return DuhamelMap(g, prm)(b, s);
}

// ============================================================================
// Picard iteration
// ============================================================================

double state_norm(const FlowState& s, const Grid& g, const Params& prm, int first) {
  const Transform tr(g);
  double m = 0;
  for (int j = first; j < g.nx; ++j) m = std::max(m, composite_norm(s.u[j], s.v[j], s.w[j], g, tr, prm, g.x[j]).total());
  return m;
}

namespace {
FlowState difference(const FlowState& a, const FlowState& b) {
  FlowState d = a;
  for (std::size_t j = 0; j < a.u.size(); ++j) {
    d.u[j] -= b.u[j];
    d.v[j] -= b.v[j];
    d.w[j] -= b.w[j];
  }
  return d;
}
void axpy(FlowState& s, double a, const FlowState& d) {
  for (std::size_t j = 0; j < s.u.size(); ++j) {
    s.u[j] += a * d.u[j];
    s.v[j] += a * d.v[j];
    s.w[j] += a * d.w[j];
  }
}
}  // namespace

FlowState picard_solve(const BoundaryData& b, const DuhamelMap& map) { return picard_solve(b, map, FlowState(map.grid())); }

FlowState picard_solve(const BoundaryData& b, const DuhamelMap& map, FlowState s) {
  const Grid& g = map.grid();
  const Params& prm = map.params();
  s.increments.clear();
  s.ratios.clear();
  double relax = 1.0;
  bool damped = false;
  int growing = 0;
  std::vector<double> incs, ratios;
  // The state norm is a seminorm, so |N(s + a d) - N(s)| <= a N(d): keep the last evaluated size
  // and the drift since, and evaluate again only when a test cannot be decided from the bounds.
  double size = 0, drift = INFINITY;
  auto size_below = [&](double t) {
    if (t < (size - drift) * (1 - 1e-12)) return false;
    if (t >= (size + drift) * (1 + 1e-12)) return true;
    size = state_norm(s, g, prm);
    drift = 0;
    return t > size;
  };
  for (int sweep = 1; sweep <= prm.max_sweeps; ++sweep) {
    FlowState next = map(b, s);
    const FlowState d = difference(next, s);
    const double inc = state_norm(d, g, prm);
    axpy(s, relax, d);
    drift += relax * inc;
    incs.push_back(inc);
    if (incs.size() >= 2) ratios.push_back(incs[incs.size() - 2] > 0 ? inc / incs[incs.size() - 2] : 0.0);
    if (!prm.nonlinear || !size_below(inc / prm.picard_tol)) {
      s.sweeps = sweep;
      s.increments = incs;
      s.ratios = ratios;
      s.damped = damped;
      return s;
    }
    // ratios are meaningless once increments sit at round-off
    if (!ratios.empty() && ratios.back() > 1.0 && size_below(inc / 1e-13))
      ++growing;
    else
      growing = 0;
    if (growing >= 3) {
      if (prm.allow_damping && !damped && prm.damping < 1.0) {
        damped = true;
        relax = prm.damping;
        growing = 0;
        continue;
      }
      throw convergence("NonContractive", "increment ratio above 1 for 3 consecutive sweeps (sweep " +
                                              std::to_string(sweep) + ")");
    }
  }
  throw convergence("MaxSweeps", "no convergence in " + std::to_string(prm.max_sweeps) + " sweeps");
}

FlowState picard_solve(const BoundaryData& b, const Grid& g, const Params& prm) {
  return picard_solve(b, DuhamelMap(g, prm));
}

// ============================================================================
// boundary determination
// ============================================================================

BoundaryFit boundary_fit(const Slice& u_b, const Slice& v_b, const Slice& w_b, const DuhamelMap& map, double tol,
                         int max_outer) {
  const Grid& g = map.grid();
  const Params& prm = map.params();
  const double S = prm.strouhal, x0 = g.x.front();
  BoundaryFit fit;
  fit.data = BoundaryData(g);
  fit.state = FlowState(g);
  QuadFields src(g);
  const Transform tr(g);

  double w_mean = 0, w_l1 = 0;
  auto relations = [&](const QuadFields& q, BoundaryData& bd) {
    const auto bt = map.boundary_terms(q);
    bd.w = w_b - bt.w;
    // the class condition holds only at the fixed point; remove the stationary mean
    // with a heat profile until then
    w_mean = bd.w(0, 0).real();
    w_l1 = lp_norm(physical(bd.w, 0, tr), 1.0, g.dy);
    for (int i = 0; i < g.ny; ++i)
      if (i != g.nyquist()) bd.w(0, i) -= w_mean * std::exp(-g.k[i] * g.k[i] * x0);
    bd.nu = u_b - multiplier_L(MultiplierId::Lu, bd.w, g, S, prm.mean_tol) - bt.u;
    bd.sync_mu(g);
    return bt;
  };

  auto bt = relations(src, fit.data);
  for (fit.outer = 1; fit.outer <= max_outer; ++fit.outer) {
    // the data move little between outer steps: continue from the previous state
    fit.state = picard_solve(fit.data, map, std::move(fit.state));
    src = map.sources(fit.state);
    BoundaryData next(g);
    bt = relations(src, next);
    const double scale = std::max({fit.data.w.max_abs(), fit.data.nu.max_abs(), 1e-300});
    const double change = std::max((next.w - fit.data.w).max_abs(), (next.nu - fit.data.nu).max_abs()) / scale;
    fit.changes.push_back(change);
    fit.data = std::move(next);
    if (change <= tol || !prm.nonlinear) break;
  }
  if (fit.outer > max_outer) throw convergence("BoundaryFit", "outer iteration did not settle");
  if (std::abs(w_mean) > 1e-8 * std::max(w_l1, 1e-300))
    throw precondition("NonZeroMean", "fitted w violates M(P0 w) = 0");
  if (fit.changes.empty() || fit.changes.back() > 0) fit.state = picard_solve(fit.data, map, std::move(fit.state));

  const Slice v_pred = multiplier_L(MultiplierId::Lv, fit.data.w, g, S, prm.mean_tol) + fit.data.mu + bt.v;
  const double vs = v_b.max_abs();
  fit.residual = vs > 0 ? (v_pred - v_b).max_abs() / vs : (v_pred - v_b).max_abs();
  return fit;
}

// ============================================================================
// synthetic boundary families
// ============================================================================

BoundaryFamily family_from_name(const std::string& name) {
  if (name == "gaussian-wake") return BoundaryFamily::gaussian_wake;
  if (name == "symmetric-wake") return BoundaryFamily::symmetric_wake;
  if (name == "pr-like") return BoundaryFamily::pr_like;
  throw config_error("unknown boundary family '" + name + "'");
}

const char* family_name(BoundaryFamily f) {
  switch (f) {
    case BoundaryFamily::gaussian_wake: return "gaussian-wake";
    case BoundaryFamily::symmetric_wake: return "symmetric-wake";
    case BoundaryFamily::pr_like: return "pr-like";
  }
  return "?";
}

BoundaryData make_boundary(BoundaryFamily family, double amplitude, std::uint64_t seed, const Grid& g,
                           const Params& prm) {
  if (amplitude < 0) throw precondition("Boundary", "amplitude must be non-negative");
  BoundaryData b(g);
  if (amplitude == 0) return b;
  const double x0 = g.x.front(), sx = std::sqrt(x0);
  // velocity deficit `amplitude` at the centre line: u ~ a1 f0(y / sqrt x0) / sqrt x0
  const double a1 = amplitude * std::sqrt(4 * M_PI * x0);
  const double a2 = -a1 / 2;  // mass balance a1 + 2 a2 = 0
  const double a3 = family == BoundaryFamily::pr_like ? 0.25 * a1 : 0.0;
  const bool sym = family == BoundaryFamily::symmetric_wake;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  constexpr int J = 4;
  double cw[J + 1], cn[J + 1];
  double fact = 1;
  for (int j = 0; j <= J; ++j) {
    if (j > 0) fact *= j;
    cw[j] = (j == 0 || (sym && j % 2 == 0)) ? 0.0 : 0.1 * U(rng) / fact;
    cn[j] = (sym && j % 2 == 1) ? 0.0 : 0.1 * U(rng) / fact;
  }
  for (int i = 0; i < g.ny; ++i) {
    if (i == g.nyquist()) continue;
    const double k = g.k[i], heat = std::exp(-k * k * x0), pois = std::exp(-std::abs(k) * x0);
    const double sg = (k > 0) - (k < 0);
    const cplx z = I1 * k * sx;
    cplx pw = 0, pn = 0, zj = 1;
    for (int j = 0; j <= J; ++j, zj *= z) {
      pw += cw[j] * zj;
      pn += cn[j] * zj;
    }
    b.w(0, i) = a1 * (I1 * k + pw / sx) * heat;
    b.nu(0, i) = (a2 - a3 * I1 * sg) * pois + a1 * pn * heat;
  }
  // oscillating modes: small, decaying in |n|, not present for the stationary pr-like family
  if (family != BoundaryFamily::pr_like) {
    for (int n = 1; n <= g.nt; ++n) {
      const double an = 0.2 * a1 * std::pow(0.3, n - 1);
      cplx dw[J + 1], dn[J + 1];
      for (int j = 0; j <= J; ++j) {
        dw[j] = (j == 0 || (sym && j % 2 == 0)) ? cplx(0.0) : cplx(U(rng), U(rng));
        dn[j] = (sym && j % 2 == 1) ? cplx(0.0) : cplx(U(rng), U(rng));
      }
      for (int i = 0; i < g.ny; ++i) {
        if (i == g.nyquist()) continue;
        const double k = g.k[i], heat = std::exp(-k * k * x0), pois = std::exp(-std::abs(k) * x0);
        const cplx z = I1 * k * sx;
        cplx pw = 0, pn = 0, zj = 1;
        double fj = 1;
        for (int j = 0; j <= J; ++j, zj *= z) {
          if (j > 0) fj *= j;
          pw += dw[j] * zj / fj;
          pn += dn[j] * zj / fj;
        }
        b.w(n, i) = an * pw / sx * heat;
        b.nu(n, i) = an * (0.5 * pn * heat + dn[0] * pois);
      }
      for (int i = 0; i < g.ny; ++i) {
        b.w(-n, g.mirror(i)) = std::conj(b.w(n, i));
        b.nu(-n, g.mirror(i)) = std::conj(b.nu(n, i));
      }
    }
  }
  enforce_reality(b.w, g);
  enforce_reality(b.nu, g);
  b.w(0, 0) = 0.0;  // class condition M(P0 w) = 0
  b.sync_mu(g);
  (void)prm;
  return b;
}

}  // namespace wake
