#include "wake/nonlinearity.hpp"

#include <fftw3.h>

#include <algorithm>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>

#include "wake/errors.hpp"

namespace wake {

namespace {

int padded_size(int ny) {
  const int n = 3 * ny / 2;
  return n % 2 ? n + 1 : n;
}

// Coefficients of mode n moved onto the padded grid (same L, same k_j for |j| < ny/2),
// then sent to physical space.
void to_padded_y(const cplx* c, const Grid& g, const Transform& tp, std::vector<cplx>& buf) {
  const int np = tp.size();
  std::fill(buf.begin(), buf.end(), cplx(0.0));
  for (int i = 0; i < g.ny; ++i) {
    if (i == g.nyquist()) continue;
    const int j = g.signed_index(i);
    buf[j >= 0 ? j : j + np] = c[i];
  }
  tp.to_y(buf.data(), buf.data());
}

void from_padded_y(std::vector<cplx>& buf, const Grid& g, const Transform& tp, cplx* c) {
  const int np = tp.size();
  tp.to_k(buf.data(), buf.data());
  for (int i = 0; i < g.ny; ++i) {
    const int j = g.signed_index(i);
    c[i] = (i == g.nyquist()) ? cplx(0.0) : buf[j >= 0 ? j : j + np];
  }
}

using Phys = std::vector<std::vector<cplx>>;  // [n + nt][padded y]

Phys to_physical_modes(const Slice& f, const Grid& g, const Transform& tp) {
  Phys out(f.modes(), std::vector<cplx>(tp.size()));
  for (int n = -f.nt(); n <= f.nt(); ++n) to_padded_y(f.mode(n), g, tp, out[n + f.nt()]);
  return out;
}

// Temporal transform plans of length m over `howmany` interleaved columns.
fftw_plan t_plan(int m, int howmany, int sign) {
  static std::mutex mtx;
  static std::map<std::tuple<int, int, int>, fftw_plan> cache;
  std::lock_guard<std::mutex> lock(mtx);
  const auto key = std::make_tuple(m, howmany, sign);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  auto* buf = fftw_alloc_complex(static_cast<std::size_t>(m) * howmany);
  // layout: buf[t * howmany + y]
  fftw_plan p = fftw_plan_many_dft(1, &m, howmany, buf, nullptr, howmany, 1, buf, nullptr, howmany, 1, sign,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(buf);
  cache.emplace(key, p);
  return p;
}

// c_n = sum_m a_m b_{n-m}, |n| <= nt, in physical y.
Phys convolve_modes(const Phys& a, const Phys& b, int nt, ModeConvolution how = ModeConvolution::automatic) {
  const int np = static_cast<int>(a[0].size());
  Phys c(2 * nt + 1, std::vector<cplx>(np));
  if (how == ModeConvolution::direct || (how == ModeConvolution::automatic && nt <= direct_convolution_max_nt)) {
    for (int n = -nt; n <= nt; ++n) {
      auto& out = c[n + nt];
      for (int m = std::max(-nt, n - nt); m <= std::min(nt, n + nt); ++m) {
        const auto& x = a[m + nt];
        const auto& y = b[n - m + nt];
        for (int j = 0; j < np; ++j) out[j] += x[j] * y[j];
      }
    }
    return c;
  }
  // synthetic time grid with at least 3/2 of the retained band, rounded up to a 2-3-5 length
  int mt = (3 * (2 * nt + 1) + 1) / 2;
  auto smooth = [](int m) {
    for (int f : {2, 3, 5})
      while (m % f == 0) m /= f;
    return m == 1;
  };
  while (mt % 2 || !smooth(mt)) ++mt;
  std::vector<cplx> ta(static_cast<std::size_t>(mt) * np), tb(ta.size());
  auto fill = [&](const Phys& f, std::vector<cplx>& t) {
    std::fill(t.begin(), t.end(), cplx(0.0));
    for (int n = -nt; n <= nt; ++n) {
      const int s = n >= 0 ? n : n + mt;
      std::copy(f[n + nt].begin(), f[n + nt].end(), t.begin() + static_cast<std::ptrdiff_t>(s) * np);
    }
    // e^{i n t}: synthesis is the backward transform
    fftw_execute_dft(t_plan(mt, np, FFTW_BACKWARD), reinterpret_cast<fftw_complex*>(t.data()),
                     reinterpret_cast<fftw_complex*>(t.data()));
  };
  fill(a, ta);
  fill(b, tb);
  for (std::size_t i = 0; i < ta.size(); ++i) ta[i] *= tb[i];
  fftw_execute_dft(t_plan(mt, np, FFTW_FORWARD), reinterpret_cast<fftw_complex*>(ta.data()),
                   reinterpret_cast<fftw_complex*>(ta.data()));
  for (int n = -nt; n <= nt; ++n) {
    const int s = n >= 0 ? n : n + mt;
    for (int j = 0; j < np; ++j) c[n + nt][j] = ta[static_cast<std::size_t>(s) * np + j] / double(mt);
  }
  return c;
}

Slice back(const Phys& f, const Grid& g, const Transform& tp) {
  Slice out(g);
  std::vector<cplx> buf(tp.size());
  for (int n = -g.nt; n <= g.nt; ++n) {
    buf = f[n + g.nt];
    from_padded_y(buf, g, tp, out.mode(n));
  }
  enforce_reality(out, g);
  return out;
}

}  // namespace

Slice dealiased_product(const Slice& a, const Slice& b, const Grid& g, ModeConvolution how) {
  const Transform tp(padded_size(g.ny), g.L);
  return back(convolve_modes(to_physical_modes(a, g, tp), to_physical_modes(b, g, tp), g.nt, how), g, tp);
}

QuadSlice compute_quads(const Slice& u, const Slice& v, const Slice& w, const Grid& g) {
  const Transform tp(padded_size(g.ny), g.L);
  const Phys pu = to_physical_modes(u, g, tp), pv = to_physical_modes(v, g, tp), pw = to_physical_modes(w, g, tp);
  QuadSlice q;
  q.R = back(convolve_modes(pu, pv, g.nt), g, tp);
  Phys vv = convolve_modes(pv, pv, g.nt);
  const Phys uu = convolve_modes(pu, pu, g.nt);
  for (std::size_t n = 0; n < vv.size(); ++n)
    for (std::size_t j = 0; j < vv[n].size(); ++j) vv[n][j] = 0.5 * (vv[n][j] - uu[n][j]);
  q.S = back(vv, g, tp);
  q.P = back(convolve_modes(pu, pw, g.nt), g, tp);
  q.Q = back(convolve_modes(pv, pw, g.nt), g, tp);
  return q;
}

QuadFields compute_quads(const std::vector<Slice>& u, const std::vector<Slice>& v, const std::vector<Slice>& w,
                         const Grid& g) {
  QuadFields f(g);
  for (int i = 0; i < g.nx; ++i) {
    QuadSlice q = compute_quads(u[i], v[i], w[i], g);
    f.R[i] = std::move(q.R);
    f.S[i] = std::move(q.S);
    f.P[i] = std::move(q.P);
    f.Q[i] = std::move(q.Q);
  }
  return f;
}

MomentReport moments(const Slice& f, const Grid& g, double edge_tol) {
  const Transform tr(g);
  const auto prof = physical(f, 0, tr);
  double peak = 0;
  for (const auto& z : prof) peak = std::max(peak, std::abs(z));
  MomentReport m;
  m.edge = peak > 0 ? std::abs(prof[0]) / peak : 0.0;
  if (m.edge > edge_tol) throw precondition("Unresolved", "field has not decayed at |y| = L");
  m.mass = f(0, 0);
  m.first = moment_y(op_P0(f), g)[f.nt()];
  return m;
}

DecompositionDefect decomposition_defect(const QuadFields& f, const Grid& g) {
  DecompositionDefect d;
  if (g.nx < 3) return d;
  double np = 0, nq = 0, ep = 0, eq = 0;
  for (int i = 1; i + 1 < g.nx; ++i) {
    // second-order derivative on a non-uniform three-point stencil
    const double h0 = g.x[i] - g.x[i - 1], h1 = g.x[i + 1] - g.x[i];
    const double c0 = -h1 / (h0 * (h0 + h1)), c1 = (h1 - h0) / (h0 * h1), c2 = h0 / (h1 * (h0 + h1));
    for (int n = -g.nt; n <= g.nt; ++n)
      for (int j = 0; j < g.ny; ++j) {
        const cplx mik(0.0, -g.k[j]);
        const cplx dxR = c0 * f.R[i - 1](n, j) + c1 * f.R[i](n, j) + c2 * f.R[i + 1](n, j);
        const cplx dxS = c0 * f.S[i - 1](n, j) + c1 * f.S[i](n, j) + c2 * f.S[i + 1](n, j);
        ep = std::max(ep, std::abs(f.P[i](n, j) - (dxR + mik * f.S[i](n, j))));
        eq = std::max(eq, std::abs(f.Q[i](n, j) - (-mik * f.R[i](n, j) + dxS)));
        np = std::max(np, std::abs(f.P[i](n, j)));
        nq = std::max(nq, std::abs(f.Q[i](n, j)));
      }
  }
  d.p = np > 0 ? ep / np : 0.0;
  d.q = nq > 0 ? eq / nq : 0.0;
  return d;
}

double fit_decay_exponent(const std::vector<double>& x, const std::vector<double>& v, double x_from) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < x_from) continue;
    if (!(v[i] > 0) || !std::isfinite(v[i])) throw convergence("TailFit", "non-positive value in the fit window");
    const double lx = std::log(x[i]), ly = std::log(v[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++m;
  }
  if (m < 2) throw convergence("TailFit", "fewer than two stations in the fit window");
  const double den = m * sxx - sx * sx;
  if (den <= 0) throw convergence("TailFit", "degenerate fit window");
  return -(m * sxy - sx * sy) / den;
}

cplx power_tail_integral(cplx z, double alpha, double tol) {
  if (z.real() > 0) throw precondition("TailFit", "growing exponential in tail integral");
  const double az = std::abs(z);
  if (az == 0.0) {
    if (alpha <= 1.0) throw convergence("TailFit", "tail exponent <= 1 with an undamped kernel");
    return 1.0 / (alpha - 1.0);
  }
  if (az > 2.0 * std::abs(alpha) + 40.0) {
    // int_0^inf e^{zs} g(s) ds = sum_m g^(m)(0) / (-z)^{m+1}
    cplx term = -1.0 / z, sum = term;
    for (int m = 0; m < 200; ++m) {
      const cplx next = term * (alpha + m) / z;
      if (std::abs(next) > std::abs(term)) break;
      term = next;
      sum += term;
      if (std::abs(term) < tol * std::abs(sum)) break;
    }
    return sum;
  }
  if (z.real() == 0.0 && alpha <= 1.0) throw convergence("TailFit", "tail exponent <= 1 with an undamped kernel");
  boost::math::quadrature::exp_sinh<double> q;
  const double inf = std::numeric_limits<double>::infinity();
  const double re = q.integrate([&](double s) { return (std::exp(z * s) * std::pow(1.0 + s, -alpha)).real(); }, 0.0,
                                inf, tol);
  const double im = z.imag() == 0.0 ? 0.0
                                    : q.integrate(
                                          [&](double s) { return (std::exp(z * s) * std::pow(1.0 + s, -alpha)).imag(); },
                                          0.0, inf, tol);
  return {re, im};
}

QIntegral cumulative_Q_integral(const std::vector<Slice>& Q, const Slice& S_x0, const Grid& g) {
  QIntegral r;
  r.cumulative.assign(g.nx, 0.0);
  std::vector<double> m(g.nx);
  for (int i = 0; i < g.nx; ++i) m[i] = Q[i](0, 0).real();
  for (int i = 1; i < g.nx; ++i) r.cumulative[i] = r.cumulative[i - 1] + 0.5 * (g.x[i] - g.x[i - 1]) * (m[i] + m[i - 1]);
  r.heat_form = -S_x0(0, 0).real();
  const double X = g.x.back();
  const double scale = *std::max_element(m.begin(), m.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
  if (scale != 0.0 && m.back() != 0.0) {
    std::vector<double> mag(g.nx);
    const double sgn = m.back() > 0 ? 1.0 : -1.0;
    for (int i = 0; i < g.nx; ++i) {
      if (g.x[i] >= X / 10 && m[i] * sgn <= 0) throw convergence("TailFit", "M(P0 Q) changes sign in the last decade");
      mag[i] = std::abs(m[i]);
    }
    r.alpha = fit_decay_exponent(g.x, mag, X / 10);
    if (r.alpha <= 1.0) throw convergence("TailFit", "tail of M(P0 Q) is not integrable");
    r.tail = m.back() * X / (r.alpha - 1.0);
  }
  r.total = r.cumulative.back() + r.tail;
  const double den = std::max(std::abs(r.total), std::abs(r.heat_form));
  r.defect = den > 0 ? std::abs(r.total - r.heat_form) / den : 0.0;
  return r;
}

}  // namespace wake
