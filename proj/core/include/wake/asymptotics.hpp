#pragma once

#include <vector>

#include "wake/solver.hpp"

namespace wake {

// ---- universal profiles ---------------------------------------------------

/// f_m(z) = z^m e^{-z^2/4} / sqrt(4 pi)
double f_profile(int m, double z);
/// g_m(z) = z^m / (pi (1 + z^2))
double g_profile(int m, double z);
/// h(z) = f_0(z)^2 + z erf(z/2) e^{-z^2/4} / (8 sqrt(pi)); solves h'' + (z/2) h' + h = f_0^2.
double h_profile(double z);

// ---- coefficients -----------------------------------------------------------

/// The explicit contributions to a4 (all in the sign convention Q = v w).
struct A4Pieces {
  double w = 0;    ///< M(y I P0 w) = -M(y^2 P0 w)/2
  double uv = 0;   ///< -M(P0 u v) at x0
  double q = 0;    ///< -int_{x0}^inf [M(y P0 Q) - a1 P0a3 / (pi x)] dx
  double log = 0;  ///< -a6 ln x0
  double q_tail = 0;
  bool q_tail_ok = true;  ///< false if the integrand had no integrable power tail
  double sum() const { return w + uv + q + log; }
};

struct AsymptoticCoeffs {
  double a1 = 0;
  std::vector<cplx> a2, a3;  ///< per temporal mode, index n + nt
  double a4 = 0;             ///< least-squares value (NaN if no station qualifies)
  double a5 = 0, a6 = 0;
  A4Pieces a4_pieces;
  double a4_discrepancy = 0;  ///< |a4 - pieces.sum()|
  double q_integral = 0;      ///< int int P0 Q
  double q_integral_defect = 0;
  double mass_relation = 0;   ///< a1 + 2 P0a2
  double a2_time_variation = 0, a3_time_variation = 0;  ///< sum_{n != 0} |a_n|

  cplx a2_mode(int n) const { return a2.empty() ? cplx(0.0) : a2[n + nt()]; }
  cplx a3_mode(int n) const { return a3.empty() ? cplx(0.0) : a3[n + nt()]; }
  int nt() const { return static_cast<int>(a2.size()) / 2; }
  static AsymptoticCoeffs zero(const Grid& g);
};

/// Fields of the expansion at distance x from the origin of the heat scale.
struct AsymptoticFields {
  Slice u, v, w;
};

enum class Expansion {
  full,   ///< every term
  first,  ///< the a1 terms only
};

AsymptoticFields asymptotic_fields(const AsymptoticCoeffs& c, double x, const Grid& g,
                                   Expansion order = Expansion::full);

/// Coefficients of a converged state with boundary data b.  The expansion is compared at
/// x - x0, the distance from the boundary.
AsymptoticCoeffs extract_coeffs(const BoundaryData& b, const FlowState& s, const DuhamelMap& map);

/// One-sided limit at k = 0+ of the odd part (f(k) - f(-k))/2, by quadratic extrapolation.
cplx odd_jump(const cplx* f, const Grid& g);

// ---- diagnostics ------------------------------------------------------------

struct A1Diagnostic {
  std::vector<double> a1_tilde;      ///< per station
  std::vector<double> a1_tilde_alt;  ///< the P0 S form
  double mean = 0;
  double variation = 0;     ///< max |a1~ - mean| / |mean|
  double cross_defect = 0;  ///< max |a1~ - alt| / |mean|
  double mean_defect = 0;   ///< relative mean of the I-argument, removed before I
};

A1Diagnostic a1_diagnostic(const FlowState& s, const DuhamelMap& map);

struct ResidualNorms {
  std::vector<double> x;
  std::vector<double> u_inf, v_inf, w_inf, w_1, w_weighted, u_first;
};

struct DecayFit {
  double u_inf = 0, v_inf = 0, w_inf = 0, w_1 = 0, w_weighted = 0, u_first = 0;  ///< fitted slopes
  double pred_u = 0, pred_v = 0, pred_w_inf = 0, pred_w_1 = 0, pred_u_first = 0;
  bool degenerate = false;  ///< residuals at round-off
  ResidualNorms norms;
};

/// Residual norms at every station of [from, to] and their log-log slopes.
/// The weighted norm is <x>^{-beta/2 - 1/4} || |y|^beta (w - w_a) ||_2, scaled like the sup norm.
DecayFit decay_fit(const FlowState& s, const AsymptoticCoeffs& c, const Grid& g, const Params& prm,
                   double from, double to);

struct ShiftCheck {
  std::vector<double> x;
  std::vector<double> u_defect, heat_defect, poisson_defect;
  double u_slope = 0, heat_slope = 0, poisson_slope = 0;
  double u_lead_slope = -0.5;  ///< slope of the leading u term
  double max_ratio = 0;        ///< max of u_defect * x / (x0 |a1| / sqrt(x))
};

/// Compares the expansion at x - x0 and at x on the given stations.
ShiftCheck shift_equivalence_check(const AsymptoticCoeffs& c, double x0, const std::vector<double>& xs,
                                   const Grid& g);

}  // namespace wake
