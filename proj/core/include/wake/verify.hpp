#pragma once

#include <functional>
#include <string>
#include <vector>

#include "wake/kernels.hpp"

namespace wake {

/// One boundedness check: sampled quantity divided by its envelope over an x sweep.
struct BoundCheck {
  std::string lemma;     ///< lemma key
  std::string quantity;  ///< what is sampled
  std::string envelope;  ///< asserted bound shape
  std::vector<double> x, ratio;
  double C = 0;            ///< fitted constant: max ratio
  double trend_end = 0;    ///< log-log slope of the ratio over the last decade
  double trend_start = 0;  ///< same over the first decade
  double margin = 0;       ///< distance to the trend tolerance (negative on failure)
  bool pass = false;
};

struct VerifyOptions {
  double strouhal = 1.0;
  std::vector<double> x;                        ///< sweep; default 40 log points on [1e-2, 1e2]
  std::vector<double> n_values{0, 1, 2, 5};     ///< temporal modes sampled (nS = n * strouhal)
  double quad_tol = 1e-8;                       ///< relative tolerance of the k quadratures
  double norm_tol = 1e-4;                       ///< grid-refinement tolerance of kernel norms
  double trend_tol = 0.05;
  static VerifyOptions defaults();
};

/// Closes a check: fitted C, end trends, margin and verdict.  An end of the sweep passes if its
/// decade slope is within trend_tol of flat, or if the slope over the outer half-decade is at most
/// 3/4 of the slope over the inner one (the ratio is levelling off rather than following a power).
void finalize(BoundCheck& c, double trend_tol);

// ---- B functions ------------------------------------------------------------

/// int dk |k|^phi |k / lambda0|^{2 mu} e^{2 Re(lm) x}
double B_mu_phi(double x, double nS, double mu, double phi, double tol = 1e-8);
/// int dk |k / lambda0|^{2 phi} |lambda0|^{-2} e^{2 Re(lm) x}
double B_phi(double x, double nS, double phi, double tol = 1e-8);

std::vector<BoundCheck> check_B_functions(const VerifyOptions& opt);

// ---- physical-space kernel norms -----------------------------------------------

/// || |y|^beta d_y^m K ||_p of the kernel with symbol sym(k), on a periodic box refined
/// (box and resolution doubled together) until successive values agree to tol.
/// `width` is the expected spatial extent, used for the first box.
double kernel_norm(const std::function<cplx(double)>& sym, double width, double kmax, double p, double beta = 0.0,
                   int m = 0, double tol = 1e-4);

struct NormSpec {
  double p, beta;
};
/// Several norms of the same kernel from shared syntheses; every one of them must settle.
std::vector<double> kernel_norms(const std::function<cplx(double)>& sym, double width, double kmax, int m,
                                 const std::vector<NormSpec>& specs, double tol = 1e-4);

/// Same for a kernel symbol at separation x and frequency nS.
double kernel_norm(KernelId id, double x, double nS, double p, double beta = 0.0, int m = 0, double tol = 1e-4);

std::vector<BoundCheck> check_kernel_norms(const VerifyOptions& opt);
std::vector<BoundCheck> check_heat_limits(const VerifyOptions& opt);
std::vector<BoundCheck> check_L_operators(const VerifyOptions& opt);

/// ||K0(x)||_1 by the same machinery (it is 1 exactly).
double poisson_mass_norm(double x);

/// Every check above, in order.
std::vector<BoundCheck> run_verification(const VerifyOptions& opt);

}  // namespace wake
