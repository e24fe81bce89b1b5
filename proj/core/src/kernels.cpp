#include "wake/kernels.hpp"

#include <cmath>
#include <map>

#include "wake/errors.hpp"

namespace wake {

namespace {
constexpr cplx I1{0.0, 1.0};

double sgn(double k) { return k > 0 ? 1.0 : (k < 0 ? -1.0 : 0.0); }
}  // namespace

Dispersion Dispersion::at(double k, double nS) {
  Dispersion d;
  const cplx z(k * k, nS);
  d.lambda0 = std::sqrt(1.0 + 4.0 * z);
  d.lp = 0.5 * (1.0 + d.lambda0);
  // lm = (1 - lambda0)/2 loses all digits for small k at n = 0; use lp lm = -z
  d.lm = -z / d.lp;
  return d;
}

double b_env(double a) { return 0.25 * (1.0 - std::sqrt(0.5 * (1.0 + std::sqrt(1.0 + 16.0 * a * a)))); }

double c_env(double a) {
  return 0.5 * std::sqrt((1.0 + std::sqrt(1.0 + 16.0 * a * a)) / (2.0 + 32.0 * a * a));
}

static const std::map<KernelId, const char*>& names() {
  static const std::map<KernelId, const char*> m = {
      {KernelId::K1, "K1"},     {KernelId::K2, "K2"},     {KernelId::K5, "K5"},
      {KernelId::K6, "K6"},     {KernelId::K7, "K7"},     {KernelId::K8, "K8"},
      {KernelId::K10, "K10"},   {KernelId::K12, "K12"},   {KernelId::K13, "K13"},
      {KernelId::Kr, "Kr"},     {KernelId::Ki, "Ki"},     {KernelId::F, "F"},
      {KernelId::G, "G"},       {KernelId::Fstar, "F*"},  {KernelId::Gstar, "G*"},
      {KernelId::K0, "K0"},     {KernelId::Kc, "Kc"},     {KernelId::K11w, "K11w"},
      {KernelId::K12w, "K12w"}, {KernelId::K21w, "K21w"}, {KernelId::K22w, "K22w"},
      {KernelId::K11u, "K11u"}, {KernelId::K12u, "K12u"}, {KernelId::K21u, "K21u"},
      {KernelId::K22u, "K22u"}, {KernelId::K11v, "K11v"}, {KernelId::K12v, "K12v"},
      {KernelId::K21v, "K21v"}, {KernelId::K22v, "K22v"},
  };
  return m;
}

const char* kernel_name(KernelId id) { return names().at(id); }

KernelId kernel_from_name(const std::string& name) {
  for (const auto& [id, s] : names())
    if (name == s) return id;
  throw precondition("UnknownKernel", name);
}

std::vector<KernelId> all_kernels() {
  std::vector<KernelId> v;
  for (const auto& [id, s] : names()) v.push_back(id);
  return v;
}

cplx symbol(KernelId id, double x, double k, double nS) {
  if (x < 0.0) throw precondition("NegativeSeparation", "symbol at x < 0");
  const bool n0 = (nS == 0.0);
  const Dispersion d = Dispersion::at(k, nS);
  const cplx L0 = d.lambda0, lp = d.lp, lm = d.lm;
  const cplx A = lm + I1 * nS, B = lp + I1 * nS;
  const cplx e = std::exp(lm * x);
  const double ak = std::abs(k), s = sgn(k);
  const double p = std::exp(-ak * x);
  const double damp = std::exp(-x);
  const cplx ik = I1 * k;

  auto K = [&](KernelId j) { return symbol(j, x, k, nS); };
  switch (id) {
    case KernelId::K1: return e;
    case KernelId::K2: return -ik / L0 * e;
    case KernelId::K5: return k * k / (L0 * B) * e;
    case KernelId::K6: return k * nS / (L0 * B) * e;
    case KernelId::K7: return -I1 * nS * lp / (L0 * B) * e;
    case KernelId::K8: return lm.real() / L0 * e;
    case KernelId::K10: return I1 * lm.imag() / L0 * e;
    case KernelId::K12: return n0 ? -lp / L0 * e : k * k / (L0 * A) * e;
    case KernelId::K13: return n0 ? cplx(0.0) : k * nS / (L0 * A) * e;
    case KernelId::Kr: return n0 ? cplx(0.0) : I1 * nS * lm.real() / (L0 * A) * e;
    case KernelId::Ki: return n0 ? cplx(0.0) : -nS * lm.imag() / (L0 * A) * e;
    case KernelId::F:
      if (k == 0.0) return n0 ? p : 0.0;
      return ik / (ik + nS * s) * p;
    case KernelId::G:
      if (k == 0.0) return 0.0;
      return ak / (ik + nS * s) * p;
    case KernelId::Fstar:
      if (k == 0.0) return n0 ? p : 0.0;
      return ik / (ik - nS * s) * p;
    case KernelId::Gstar:
      if (k == 0.0) return 0.0;
      return -ak / (ik - nS * s) * p;
    case KernelId::K0: return p;
    case KernelId::Kc: return n0 ? std::exp(-k * k * x) : 0.0;
    case KernelId::K11w: return -K(KernelId::K8) - K(KernelId::K10);
    case KernelId::K12w: return -K(KernelId::K2);
    case KernelId::K21w: return -damp * (K(KernelId::K1) + K(KernelId::K8) + K(KernelId::K10));
    case KernelId::K22w: return -damp * K(KernelId::K2);
    case KernelId::K11u: return K(KernelId::K2) - K(KernelId::K13);
    case KernelId::K12u: return -K(KernelId::F) - K(KernelId::K12);
    case KernelId::K21u: return damp * (K(KernelId::K2) - K(KernelId::K6));
    case KernelId::K22u: return K(KernelId::Fstar) - damp * K(KernelId::K5);
    case KernelId::K11v: return K(KernelId::K11w) + K(KernelId::Kr) + K(KernelId::Ki);
    case KernelId::K12v: return K(KernelId::K12w) + K(KernelId::G) + K(KernelId::K13);
    case KernelId::K21v: return K(KernelId::K21w) - damp * K(KernelId::K7);
    case KernelId::K22v:
      return K(KernelId::K22w) - K(KernelId::Gstar) + damp * K(KernelId::K6);
  }
  throw precondition("UnknownKernel", "symbol");
}

Slice apply_kernel(KernelId id, double sep, const Slice& f, const Grid& g, double strouhal) {
  if (sep < 0.0) throw precondition("NegativeSeparation", "apply_kernel at negative separation");
  Slice out(f.nt(), f.ny());
  for (int n = -f.nt(); n <= f.nt(); ++n) {
    const cplx* c = f.mode(n);
    cplx* o = out.mode(n);
    for (int i = 0; i < g.ny; ++i) o[i] = symbol(id, sep, g.k[i], n * strouhal) * c[i];
    o[g.nyquist()] = 0.0;
  }
  return out;
}

cplx multiplier_symbol(MultiplierId id, double k, double nS) {
  const bool n0 = (nS == 0.0);
  const double k2 = k * k, den = k2 + nS * nS;
  switch (id) {
    case MultiplierId::L1: return den == 0.0 ? 1.0 : k2 / den;
    // k, not |k|: the local R term of u is -(k nS / (k^2 + n^2 S^2)) R, which is what
    // the diagonalised system gives and what keeps u even for symmetric data
    case MultiplierId::L2: return den == 0.0 ? 0.0 : k * nS / den;
    case MultiplierId::Lu: {
      const Dispersion d = Dispersion::at(k, nS);
      if (n0) {
        if (k == 0.0) throw precondition("SingularSymbol", "Lu at k = 0, n = 0");
        return -I1 * d.lp / k;  // ik / lm with lm = -k^2 / lp
      }
      return I1 * k / (d.lm + I1 * nS);
    }
    case MultiplierId::Lv: {
      if (n0) return 1.0;
      const Dispersion d = Dispersion::at(k, nS);
      return d.lm / (d.lm + I1 * nS);
    }
    case MultiplierId::Lu_tilde: {
      const Dispersion d = Dispersion::at(k, nS);
      return n0 ? -I1 * k / d.lp : I1 * k / (d.lm + I1 * nS);
    }
    case MultiplierId::Lv_tilde: {
      if (n0) return 0.0;
      const Dispersion d = Dispersion::at(k, nS);
      return -I1 * nS / (d.lm + I1 * nS);
    }
  }
  throw precondition("UnknownMultiplier", "multiplier_symbol");
}

Slice multiplier_L(MultiplierId id, const Slice& f, const Grid& g, double strouhal,
                   double mean_tol) {
  Slice out(f.nt(), f.ny());
  const bool split = (id == MultiplierId::Lu);
  for (int n = -f.nt(); n <= f.nt(); ++n) {
    const double nS = n * strouhal;
    const bool stat = (nS == 0.0);
    const MultiplierId use = (split && stat) ? MultiplierId::Lu_tilde : id;
    const cplx* c = f.mode(n);
    cplx* o = out.mode(n);
    for (int i = 0; i < g.ny; ++i) o[i] = multiplier_symbol(use, g.k[i], nS) * c[i];
    o[g.nyquist()] = 0.0;
  }
  if (split) {
    // Lu = -I P0 + Lu~ on the stationary mode
    const Slice ip = op_I(op_P0(f), g, mean_tol);
    for (int i = 0; i < g.ny; ++i) out(0, i) -= ip(0, i);
  }
  return out;
}

CompositeDecomp decompose(double k, double nS) {
  CompositeDecomp c;
  const bool n0 = (nS == 0.0);
  c.d = Dispersion::at(k, nS);
  const cplx L0 = c.d.lambda0, lp = c.d.lp, lm = c.d.lm;
  const cplx A = lm + I1 * nS, B = lp + I1 * nS;
  const cplx ik = I1 * k;
  const double ak = std::abs(k), s = sgn(k);
  c.absk = ak;

  const cplx r12 = n0 ? -lp : k * k / A;
  const cplx r13 = n0 ? cplx(0.0) : k * nS / A;
  const cplx fac = n0 ? cplx(0.0) : I1 * nS / A;

  cplx F = 0, Fs = 0, G = 0, Gs = 0;
  if (k == 0.0) {
    F = Fs = n0 ? 1.0 : 0.0;
  } else {
    F = ik / (ik + nS * s);
    Fs = ik / (ik - nS * s);
    G = ak / (ik + nS * s);
    Gs = -ak / (ik - nS * s);
  }

  // downstream, omega
  c.down[0][0] = {-lm / L0, 0.0};
  c.down[0][1] = {ik / L0, 0.0};
  // downstream, u: K2 - K13 and -F - K12
  c.down[1][0] = {(-ik - r13) / L0, 0.0};
  c.down[1][1] = {-r12 / L0, -F};
  // downstream, v: -K8 - K10 + Kr + Ki and -K2 + G + K13
  c.down[2][0] = {-lm / L0 * (1.0 - fac), 0.0};
  c.down[2][1] = {(ik + r13) / L0, G};
  // upstream, omega: -e^{-s}(K1 + K8 + K10) = -(lp/L0) e^{-lp s}
  c.up[0][0] = {-lp / L0, 0.0};
  c.up[0][1] = {ik / L0, 0.0};
  // upstream, u
  c.up[1][0] = {(-ik - k * nS / B) / L0, 0.0};
  c.up[1][1] = {-k * k / (L0 * B), Fs};
  // upstream, v
  c.up[2][0] = {(-lp + I1 * nS * lp / B) / L0, 0.0};
  c.up[2][1] = {(ik + k * nS / B) / L0, -Gs};

  c.L1 = multiplier_symbol(MultiplierId::L1, k, nS);
  c.L2 = multiplier_symbol(MultiplierId::L2, k, nS);
  c.Lu = (n0 && k == 0.0) ? cplx(0.0) : multiplier_symbol(MultiplierId::Lu, k, nS);
  c.Lv = multiplier_symbol(MultiplierId::Lv, k, nS);
  return c;
}

double IdentityReport::max() const {
  return std::max({k2_identity, dxk12, k2_from_k8, k12_from_k1k8, q_assembly, decomposition});
}

IdentityReport composite_symbol_identities() {
  IdentityReport rep;
  const double xs[] = {0.0, 0.1, 0.5, 1.0, 3.0, 10.0};
  const double ks[] = {-5.0, -2.0, -1.0, -0.5, -0.1, 0.0, 0.1, 0.5, 1.0, 2.0, 5.0};
  const double ns[] = {0.0, -5.0, -2.0, -1.0, -0.5, 0.5, 1.0, 2.0, 5.0};
  auto rel = [](cplx a, cplx b, double scale) {
    const double d = std::abs(a - b);
    return scale > 0 ? d / scale : d;
  };
  using K = KernelId;
  const cplx P(0.7, -0.3), Q(-0.2, 0.9);
  for (double x : xs)
    for (double k : ks)
      for (double nS : ns) {
        const cplx dy(0.0, -k);
        const cplx k1 = symbol(K::K1, x, k, nS), k2 = symbol(K::K2, x, k, nS),
                   k8 = symbol(K::K8, x, k, nS), k10 = symbol(K::K10, x, k, nS),
                   k12 = symbol(K::K12, x, k, nS);
        const double sc = std::abs(k) * (std::abs(k1) + 2 * std::abs(k8) + 2 * std::abs(k10)) + 1e-300;
        rep.k2_identity = std::max(rep.k2_identity, rel(k2, dy * (k1 + 2.0 * k8 + 2.0 * k10), sc));
        const Dispersion d = Dispersion::at(k, nS);
        if (nS == 0.0) {
          const cplx dx12 = d.lm * k12;
          rep.dxk12 = std::max(rep.dxk12, rel(dx12, -dy * k2, std::abs(dx12) + std::abs(dy * k2) + 1e-300));
          rep.k2_from_k8 = std::max(rep.k2_from_k8, rel(k2, 2.0 * dy * k8 + dy * k1, sc));
          rep.k12_from_k1k8 =
              std::max(rep.k12_from_k1k8, rel(k12, -k1 - k8, std::abs(k1) + std::abs(k8) + 1e-300));
        }
        const cplx e = std::exp(d.lm * x), eu = std::exp(-d.lp * x);
        const cplx lhs = symbol(K::K11w, x, k, nS) * P + symbol(K::K12w, x, k, nS) * Q;
        const cplx rhs = -(d.lm * P - cplx(0.0, k) * Q) / d.lambda0 * e;
        const cplx lhs2 = symbol(K::K21w, x, k, nS) * P + symbol(K::K22w, x, k, nS) * Q;
        const cplx rhs2 = -(d.lp * P - cplx(0.0, k) * Q) / d.lambda0 * eu;
        rep.q_assembly = std::max(rep.q_assembly, rel(lhs, rhs, std::abs(rhs) + std::abs(e) * 1e-300 + 1e-300));
        rep.q_assembly = std::max(rep.q_assembly, rel(lhs2, rhs2, std::abs(rhs2) + 1e-300));

        const CompositeDecomp c = decompose(k, nS);
        const double p = std::exp(-std::abs(k) * x);
        const K down[3][2] = {{K::K11w, K::K12w}, {K::K11u, K::K12u}, {K::K11v, K::K12v}};
        const K up[3][2] = {{K::K21w, K::K22w}, {K::K21u, K::K22u}, {K::K21v, K::K22v}};
        for (int f = 0; f < 3; ++f)
          for (int s = 0; s < 2; ++s) {
            const cplx a = symbol(down[f][s], x, k, nS);
            const cplx b = c.down[f][s].heat * e + c.down[f][s].poisson * p;
            const double sc1 = std::abs(c.down[f][s].heat * e) + std::abs(c.down[f][s].poisson * p);
            rep.decomposition = std::max(rep.decomposition, rel(a, b, sc1 + 1e-300));
            const cplx a2 = symbol(up[f][s], x, k, nS);
            const cplx b2 = c.up[f][s].heat * eu + c.up[f][s].poisson * p;
            const double sc2 = std::abs(c.up[f][s].heat * eu) + std::abs(c.up[f][s].poisson * p);
            rep.decomposition = std::max(rep.decomposition, rel(a2, b2, sc2 + 1e-300));
          }
      }
  return rep;
}

}  // namespace wake
