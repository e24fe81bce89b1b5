#pragma once

#include <vector>

#include "wake/spectral.hpp"

namespace wake {

/// Quadratic quantities at one station: R = uv, S = (v^2 - u^2)/2, P = u w, Q = v w.
struct QuadSlice {
  Slice R, S, P, Q;
};

/// The same quantities at every station.
struct QuadFields {
  std::vector<Slice> R, S, P, Q;

  QuadFields() = default;
  explicit QuadFields(const Grid& g) : R(g.nx, Slice(g)), S(g.nx, Slice(g)), P(g.nx, Slice(g)), Q(g.nx, Slice(g)) {}
  int stations() const { return static_cast<int>(P.size()); }
};

/// Products formed on a 3/2-padded y grid; modes convolved directly for nt <= 8,
/// through a padded transform in t otherwise.
QuadSlice compute_quads(const Slice& u, const Slice& v, const Slice& w, const Grid& g);
QuadFields compute_quads(const std::vector<Slice>& u, const std::vector<Slice>& v,
                         const std::vector<Slice>& w, const Grid& g);

/// How temporal modes are convolved: `automatic` sums directly up to direct_convolution_max_nt.
enum class ModeConvolution { automatic, direct, transform };
inline constexpr int direct_convolution_max_nt = 8;

/// Pointwise product a*b (mode convolution included), dealiased.
Slice dealiased_product(const Slice& a, const Slice& b, const Grid& g, ModeConvolution how = ModeConvolution::automatic);

struct MomentReport {
  cplx mass;     ///< M(P0 f)
  cplx first;    ///< M(y P0 f)
  double edge;   ///< |P0 f| at y = -L relative to its maximum
};

/// Moments of the stationary part; throws Unresolved if the field has not decayed at the box edge.
MomentReport moments(const Slice& f, const Grid& g, double edge_tol = 1e-6);

/// Relative defects of P = d_x R + d_y S and Q = -d_y R + d_x S, d_x by finite differences.
struct DecompositionDefect {
  double p = 0, q = 0;
};
DecompositionDefect decomposition_defect(const QuadFields& f, const Grid& g);

/// Least-squares exponent alpha of v ~ x^{-alpha} over x >= x_from.
double fit_decay_exponent(const std::vector<double>& x, const std::vector<double>& v, double x_from);

/// Closed tail of int_X^inf e^{z (t - X)/X} (t / X)^{-alpha} dt / X = int_0^inf e^{z s} (1+s)^{-alpha} ds,
/// for Re z <= 0.
cplx power_tail_integral(cplx z, double alpha, double tol = 1e-12);

struct QIntegral {
  std::vector<double> cumulative;  ///< int_{x0}^{x_i} M(P0 Q)
  double total = 0;                ///< including the fitted tail beyond Xmax
  double tail = 0;
  double alpha = 0;                ///< tail exponent of M(P0 Q)
  double heat_form = 0;            ///< -M(P0 S(x0))
  double defect = 0;               ///< |total - heat_form| / max(|total|, |heat_form|)
};

/// Trapezoidal x-integral of the station masses of P0 Q, plus a power-law tail.
QIntegral cumulative_Q_integral(const std::vector<Slice>& Q, const Slice& S_x0, const Grid& g);

}  // namespace wake
