#pragma once

#include <string>
#include <vector>

#include "wake/spectral.hpp"

namespace wake {

/// Roots of Lambda^2 - Lambda - (k^2 + i nS) = 0 and their difference.
struct Dispersion {
  cplx lambda0;  ///< sqrt(1 + 4(k^2 + i nS)), principal branch
  cplx lp;       ///< (1 + lambda0) / 2
  cplx lm;       ///< (1 - lambda0) / 2, computed as -(k^2 + i nS) / lp

  static Dispersion at(double k, double nS);
};

/// Envelope functions: Re lambda_- <= b(nS) - c(nS) k^2 for |k| <= 1.
double b_env(double alpha);
double c_env(double alpha);

enum class KernelId {
  K1, K2, K5, K6, K7, K8, K10, K12, K13, Kr, Ki, F, G, Fstar, Gstar, K0, Kc,
  K11w, K12w, K21w, K22w,
  K11u, K12u, K21u, K22u,
  K11v, K12v, K21v, K22v,
};

const char* kernel_name(KernelId id);
KernelId kernel_from_name(const std::string& name);
std::vector<KernelId> all_kernels();

/// Exact symbol value at separation x >= 0.  nS == 0 selects the stationary mode.
cplx symbol(KernelId id, double x, double k, double nS);

/// Per-(n, k) multiplication by symbol(id, sep, ...).
Slice apply_kernel(KernelId id, double sep, const Slice& f, const Grid& g, double strouhal);

enum class MultiplierId { L1, L2, Lu, Lv, Lu_tilde, Lv_tilde };
cplx multiplier_symbol(MultiplierId id, double k, double nS);
/// Lu routes its stationary singular part through -I P0.
Slice multiplier_L(MultiplierId id, const Slice& f, const Grid& g, double strouhal,
                   double mean_tol = 1e-10);

/// The composite kernels written as sums of exponentials in the separation s:
///   downstream (s = x - x~):  heat * e^{lm s} + poisson * e^{-|k| s}
///   upstream   (s = x~ - x):  heat * e^{-lp s} + poisson * e^{-|k| s}
struct ExpPair {
  cplx heat, poisson;
};
struct CompositeDecomp {
  Dispersion d;
  double absk = 0;
  // [field: 0 = omega, 1 = u, 2 = v][source: 0 = P, 1 = Q]
  ExpPair down[3][2];
  ExpPair up[3][2];
  // local and linear multipliers (Lu is 0 at k = 0, n = 0; that mode goes through -I P0)
  cplx L1, L2, Lu, Lv;
};
CompositeDecomp decompose(double k, double nS);

struct IdentityReport {
  double k2_identity = 0;      ///< K2 = d_y(K1 + 2 K8 + 2 K10), all n
  double dxk12 = 0;            ///< d_x K12 = -d_y K2, n = 0
  double k2_from_k8 = 0;       ///< K2 = 2 d_y K8 + d_y K1, n = 0
  double k12_from_k1k8 = 0;    ///< K12 = -K1 - K8, n = 0
  double q_assembly = 0;       ///< composite omega kernels = -(lambda_pm P - ik Q)/lambda0 e
  double decomposition = 0;    ///< exponential split reproduces every composite symbol
  double max() const;
};
IdentityReport composite_symbol_identities();

}  // namespace wake
