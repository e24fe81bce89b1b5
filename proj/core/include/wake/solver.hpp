#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wake/kernels.hpp"
#include "wake/nonlinearity.hpp"

namespace wake {

/// Boundary data at x0: the vorticity parameter w, the Poisson datum nu, and mu = H nu.
struct BoundaryData {
  Slice w, nu, mu;

  BoundaryData() = default;
  explicit BoundaryData(const Grid& g) : w(g), nu(g), mu(g) {}
  /// Recomputes mu from nu.
  void sync_mu(const Grid& g);
};

/// Throws unless mu = H nu, M(P0 w) = 0 and the boundary norm is within rho.
void check_boundary(const BoundaryData& b, const Grid& g, const Params& prm);
double boundary_norm(const BoundaryData& b, const Grid& g, const Params& prm);

struct FlowState {
  std::vector<Slice> u, v, w;
  int sweeps = 0;
  std::vector<double> increments;  ///< composite norm of each sweep's change
  std::vector<double> ratios;      ///< increments[j] / increments[j-1]
  bool damped = false;

  FlowState() = default;
  explicit FlowState(const Grid& g) : u(g.nx, Slice(g)), v(g.nx, Slice(g)), w(g.nx, Slice(g)) {}
};

/// Exact integral over one panel of length h of e^{lam s} times the linear interpolant
/// of f, s measured from the near end:  e = e^{lam h}, integral = a f_near + b f_far.
struct PanelWeights {
  cplx e, a, b;
};
PanelWeights panel_weights(cplx lam, double h);

/// Per-sweep tail exponents used beyond Xmax, one per temporal mode.
struct TailExponents {
  std::vector<double> P, Q;
};
/// Power-law exponent of each temporal mode (l2 over k) fitted on the last decade of stations.
std::vector<double> tail_exponents(const std::vector<Slice>& f, const Grid& g);

/// The right-hand side map: boundary data and quadratic sources to (u, v, w) at every station.
class DuhamelMap {
 public:
  DuhamelMap(const Grid& g, const Params& prm);

  const Grid& grid() const { return g_; }
  const Params& params() const { return prm_; }

  /// Linear evolution of the boundary data (no sources).
  FlowState linear(const BoundaryData& b) const;
  /// Full right-hand side for given sources.
  FlowState apply(const BoundaryData& b, const QuadFields& src) const;
  /// Sources of the given state (zero when the nonlinearity is disabled).
  QuadFields sources(const FlowState& s) const;
  /// One Picard step: apply(b, sources(s)).
  FlowState operator()(const BoundaryData& b, const FlowState& s) const;

  /// Upstream integrals and local terms at x0 (the parts of the boundary relations
  /// that depend on the interior solution), for u, v, w.
  struct BoundaryTerms {
    Slice u, v, w;
  };
  BoundaryTerms boundary_terms(const QuadFields& src) const;

  const TailExponents& last_tail() const { return tail_; }

 private:
  Grid g_;
  Params prm_;
  std::vector<CompositeDecomp> dec_;  // [(n + nt) * ny + i]
  mutable TailExponents tail_;

  const CompositeDecomp& dec(int n, int i) const { return dec_[static_cast<std::size_t>(n + g_.nt) * g_.ny + i]; }
  void integrate(const BoundaryData* b, const QuadFields* src, FlowState& out, BoundaryTerms* bt) const;
};

/// Convenience wrapper around one DuhamelMap step.
FlowState duhamel_map(const BoundaryData& b, const FlowState& s, const Grid& g, const Params& prm);

/// Fixed-point iteration from the zero state.
FlowState picard_solve(const BoundaryData& b, const DuhamelMap& map);
FlowState picard_solve(const BoundaryData& b, const Grid& g, const Params& prm);
/// Same iteration started from `start` instead of the zero state.
FlowState picard_solve(const BoundaryData& b, const DuhamelMap& map, FlowState start);

/// Sup over stations of the composite norm of (u, v, w).
double state_norm(const FlowState& s, const Grid& g, const Params& prm, int first = 0);

struct BoundaryFit {
  BoundaryData data;
  FlowState state;
  double residual = 0;  ///< relative defect of the unused v-relation
  int outer = 0;
  std::vector<double> changes;
};

/// Boundary data from traces at x0: w from the w-relation, nu from the u-relation,
/// the v-relation is reported as the compatibility residual.
BoundaryFit boundary_fit(const Slice& u_b, const Slice& v_b, const Slice& w_b, const DuhamelMap& map,
                         double tol = 1e-10, int max_outer = 40);

enum class BoundaryFamily { gaussian_wake, symmetric_wake, pr_like };
BoundaryFamily family_from_name(const std::string& name);
const char* family_name(BoundaryFamily f);

/// Synthetic boundary data: a wake of the given velocity deficit plus seeded perturbations.
BoundaryData make_boundary(BoundaryFamily family, double amplitude, std::uint64_t seed, const Grid& g,
                           const Params& prm);

}  // namespace wake
