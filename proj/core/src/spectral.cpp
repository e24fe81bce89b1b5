#include "wake/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "wake/errors.hpp"

namespace wake {

// ---- Slice ----------------------------------------------------------------

Slice& Slice::operator+=(const Slice& o) {
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}
Slice& Slice::operator-=(const Slice& o) {
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  return *this;
}
Slice& Slice::operator*=(double s) {
  for (auto& z : c_) z *= s;
  return *this;
}
Slice& Slice::operator*=(cplx s) {
  for (auto& z : c_) z *= s;
  return *this;
}
double Slice::max_abs() const {
  double m = 0;
  for (const auto& z : c_) m = std::max(m, std::abs(z));
  return m;
}
bool Slice::finite() const {
  return std::all_of(c_.begin(), c_.end(),
                     [](const cplx& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

// ---- FFT plans ------------------------------------------------------------

namespace {

// Plans are created once per (size, sign) with FFTW_ESTIMATE so that repeated
// runs pick the same algorithm and produce identical bytes.
fftw_plan plan_for(int n, int sign) {
  static std::mutex mtx;
  static std::map<std::pair<int, int>, fftw_plan> cache;
  std::lock_guard<std::mutex> lock(mtx);
  auto key = std::make_pair(n, sign);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto* buf = fftw_alloc_complex(n);
  fftw_plan p = fftw_plan_dft_1d(n, buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(buf);
  cache.emplace(key, p);
  return p;
}

}  // namespace

Transform::Transform(int ny, double L) : n_(ny), L_(L), dy_(2.0 * L / ny) {
  if (ny < 2 || ny % 2) throw precondition("Transform", "size must be even");
  plan_for(n_, FFTW_FORWARD);
  plan_for(n_, FFTW_BACKWARD);
}

// y_m = -L + m dy and k_j dy = 2 pi j / N, so e^{i k_j y_m} = (-1)^j e^{2 pi i j m / N}.
void Transform::to_k(const cplx* y, cplx* k) const {
  if (k != y) std::copy(y, y + n_, k);
  auto* z = reinterpret_cast<fftw_complex*>(k);
  fftw_execute_dft(plan_for(n_, FFTW_BACKWARD), z, z);
  for (int i = 0; i < n_; ++i) k[i] *= (i & 1) ? -dy_ : dy_;
}

void Transform::to_y(const cplx* k, cplx* y) const {
  const double s = 1.0 / (2.0 * L_);
  for (int i = 0; i < n_; ++i) y[i] = k[i] * ((i & 1) ? -s : s);
  auto* z = reinterpret_cast<fftw_complex*>(y);
  fftw_execute_dft(plan_for(n_, FFTW_FORWARD), z, z);
}

std::vector<cplx> Transform::to_k(const std::vector<cplx>& y) const {
  if (static_cast<int>(y.size()) != n_) throw precondition("Transform", "size mismatch");
  std::vector<cplx> k(n_);
  to_k(y.data(), k.data());
  return k;
}

std::vector<cplx> Transform::to_y(const std::vector<cplx>& k) const {
  if (static_cast<int>(k.size()) != n_) throw precondition("Transform", "size mismatch");
  std::vector<cplx> y(n_);
  to_y(k.data(), y.data());
  return y;
}

// ---- operators ------------------------------------------------------------

Slice deriv_y(const Slice& f, const Grid& g, int m) {
  Slice out = f;
  for (int n = -f.nt(); n <= f.nt(); ++n) {
    cplx* c = out.mode(n);
    for (int i = 0; i < g.ny; ++i) c[i] *= std::pow(cplx(0.0, -g.k[i]), m);
    if (m % 2) c[g.nyquist()] = 0.0;
  }
  return out;
}

Slice op_I(const Slice& f, const Grid& g, double mean_tol) {
  Transform tr(g);
  Slice out(f.nt(), f.ny());
  std::vector<cplx> buf(g.ny);
  for (int n = -f.nt(); n <= f.nt(); ++n) {
    const cplx* c = f.mode(n);
    const cplx mean = c[0];
    if (n == 0) {
      tr.to_y(c, buf.data());
      const double l1 = lp_norm(buf, 1.0, g.dy);
      if (std::abs(mean) > mean_tol * std::max(l1, 1e-300) && std::abs(mean) > 0.0)
        throw precondition("NonZeroMean", "M(P0 f) = " + std::to_string(std::abs(mean)) +
                                              " exceeds tolerance");
    }
    cplx* o = out.mode(n);
    // spectral primitive for k != 0, value at -L from sum_j (i/k_j) c_j (-1)^j / 2L
    cplx at_left = 0.0;
    for (int i = 1; i < g.ny; ++i) {
      if (i == g.nyquist()) continue;
      o[i] = cplx(0.0, 1.0 / g.k[i]) * c[i];
      at_left += (i & 1) ? -o[i] : o[i];
    }
    at_left /= 2.0 * g.L;
    // (I f)(-L) = -M(f)/2 fixes the constant; its k = 0 coefficient is 2L times it
    const cplx shift = -0.5 * mean - at_left;
    o[0] = 2.0 * g.L * shift;
  }
  return out;
}

Slice op_S(const Slice& f, const Grid& g) {
  Slice out(f.nt(), f.ny());
  for (int n = -f.nt(); n <= f.nt(); ++n) {
    const cplx* c = f.mode(n);
    cplx* o = out.mode(n);
    for (int i = 0; i < g.ny; ++i) o[i] = c[i] + c[g.mirror(i)];
    o[g.nyquist()] = 0.0;
  }
  return out;
}

std::vector<cplx> op_M(const Slice& f) {
  std::vector<cplx> m;
  for (int n = -f.nt(); n <= f.nt(); ++n) m.push_back(f(n, 0));
  return m;
}

Slice op_P(const Slice& f) {
  Slice out = f;
  std::fill(out.mode(0), out.mode(0) + f.ny(), cplx(0.0));
  return out;
}

Slice op_P0(const Slice& f) {
  Slice out(f.nt(), f.ny());
  std::copy(f.mode(0), f.mode(0) + f.ny(), out.mode(0));
  return out;
}

Slice op_hilbert(const Slice& f, const Grid& g) {
  Slice out(f.nt(), f.ny());
  for (int n = -f.nt(); n <= f.nt(); ++n) {
    const cplx* c = f.mode(n);
    cplx* o = out.mode(n);
    for (int i = 1; i < g.ny; ++i) o[i] = cplx(0.0, g.k[i] > 0 ? 1.0 : -1.0) * c[i];
    o[0] = 0.0;
    o[g.nyquist()] = 0.0;
  }
  return out;
}

// f^'(0) = i M(y f) and f^''(0) = -M(y^2 f).
namespace {
// trapezoid in physical space; spectrally accurate for fields decaying inside the box
std::vector<cplx> physical_moment(const Slice& f, const Grid& g, int power) {
  Transform tr(g);
  std::vector<cplx> m;
  for (int n = -f.nt(); n <= f.nt(); ++n) {
    const auto fy = physical(f, n, tr);
    cplx acc = 0;
    for (int j = 0; j < g.ny; ++j) acc += std::pow(g.y[j], power) * fy[j];
    m.push_back(acc * g.dy);
  }
  return m;
}
}  // namespace

std::vector<cplx> moment_y(const Slice& f, const Grid& g) { return physical_moment(f, g, 1); }

std::vector<cplx> moment_y2(const Slice& f, const Grid& g) { return physical_moment(f, g, 2); }

void enforce_reality(Slice& f, const Grid& g) {
  for (int n = 0; n <= f.nt(); ++n) {
    for (int i = 0; i < g.ny; ++i) {
      const int mi = g.mirror(i);
      if (n == 0 && mi < i) continue;
      const cplx a = f(n, i), b = std::conj(f(-n, mi));
      const cplx avg = 0.5 * (a + b);
      f(n, i) = avg;
      f(-n, mi) = std::conj(avg);
    }
    f(n, g.nyquist()) = 0.0;
    f(-n, g.nyquist()) = 0.0;
  }
}

double reality_defect(const Slice& f, const Grid& g) {
  double d = 0;
  for (int n = -f.nt(); n <= f.nt(); ++n)
    for (int i = 0; i < g.ny; ++i) d = std::max(d, std::abs(f(n, i) - std::conj(f(-n, g.mirror(i)))));
  return d;
}

std::vector<cplx> physical(const Slice& f, int n, const Transform& tr) {
  std::vector<cplx> y(tr.size());
  tr.to_y(f.mode(n), y.data());
  return y;
}

Slice from_physical(const std::vector<std::vector<cplx>>& modes, const Grid& g, const Transform& tr) {
  const int nt = (static_cast<int>(modes.size()) - 1) / 2;
  Slice out(nt, g.ny);
  for (int n = -nt; n <= nt; ++n) tr.to_k(modes[n + nt].data(), out.mode(n));
  return out;
}

// ---- norms ----------------------------------------------------------------

double lp_norm(const std::vector<cplx>& f, double p, double dy) {
  if (p < 1.0) throw precondition("Norm", "p < 1");
  if (std::isinf(p)) {
    double m = 0;
    for (const auto& z : f) m = std::max(m, std::abs(z));
    return m;
  }
  double s = 0;
  if (p == 1.0) {
    for (const auto& z : f) s += std::abs(z);
    return s * dy;
  }
  if (p == 2.0) {
    for (const auto& z : f) s += std::norm(z);
    return std::sqrt(s * dy);
  }
  if (p == 3.0) {
    for (const auto& z : f) {
      const double a = std::abs(z);
      s += a * a * a;
    }
  } else {
    for (const auto& z : f) s += std::pow(std::abs(z), p);
  }
  return std::pow(s * dy, 1.0 / p);
}

double lp_norm_weighted(const std::vector<cplx>& f, const std::vector<double>& y, double beta,
                        double p, double dy) {
  std::vector<cplx> w(f.size());
  if (beta == 2.0)
    for (std::size_t i = 0; i < f.size(); ++i) w[i] = f[i] * (y[i] * y[i]);
  else
    for (std::size_t i = 0; i < f.size(); ++i) w[i] = f[i] * std::pow(std::abs(y[i]), beta);
  return lp_norm(w, p, dy);
}

double weighted_norm(const Slice& f, const Grid& g, const Transform& tr, double p, double sigma,
                     double x, double beta, int m) {
  if (p < 1.0) throw precondition("Norm", "p < 1");
  const Slice d = m ? deriv_y(f, g, m) : f;
  double s = 0;
  for (int n = -f.nt(); n <= f.nt(); ++n) {
    const auto prof = physical(d, n, tr);
    s += beta != 0.0 ? lp_norm_weighted(prof, g.y, beta, p, g.dy) : lp_norm(prof, p, g.dy);
  }
  return std::pow(jb(x), sigma) * s;
}

double NormReport::total() const {
  double s = 0;
  for (double v : c) s += v;
  return s;
}

NormReport composite_norm(const Slice& u, const Slice& v, const Slice& w, const Grid& g,
                          const Transform& tr, const Params& prm, double x) {
  const double inf = INFINITY;
  const double p = prm.p, q = prm.q, r = prm.r, phi = prm.phi, eta = prm.eta, xi = prm.xi,
               beta = prm.beta;
  const Slice du = deriv_y(u, g), dv = deriv_y(v, g), dw = deriv_y(w, g);
  const double bx = jb(x);
  NormReport rep;
  std::vector<cplx> a, b, c, da, db, dc;
  double s[10] = {};
  for (int n = -u.nt(); n <= u.nt(); ++n) {
    a = physical(u, n, tr);
    b = physical(v, n, tr);
    c = physical(w, n, tr);
    da = physical(du, n, tr);
    db = physical(dv, n, tr);
    dc = physical(dw, n, tr);
    s[0] += lp_norm(a, inf, g.dy);
    s[1] += lp_norm(a, q, g.dy);
    s[2] += lp_norm(da, r, g.dy);
    s[3] += lp_norm(b, inf, g.dy);
    s[4] += lp_norm(b, p, g.dy);
    s[5] += lp_norm(db, r, g.dy);
    s[6] += lp_norm(c, 2.0, g.dy);
    s[7] += lp_norm_weighted(c, g.y, beta, 2.0, g.dy);
    s[8] += lp_norm(dc, inf, g.dy);
    s[9] += lp_norm(dc, 1.0, g.dy);
  }
  const double sig[10] = {0.5,
                          0.5 - 1.0 / q,
                          1.0 - 1.0 / (2.0 * r) - eta,
                          1.0 - phi,
                          1.0 - phi - 1.0 / p,
                          1.5 - 1.0 / (2.0 * r) - xi,
                          0.75,
                          0.75 - beta / 2.0,
                          1.5,
                          1.0};
  for (int i = 0; i < 10; ++i) rep.c[i] = std::pow(bx, sig[i]) * s[i];
  return rep;
}

}  // namespace wake
