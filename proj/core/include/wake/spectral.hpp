#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>

#include "wake/params.hpp"

namespace wake {

using cplx = std::complex<double>;

/// Coefficients c[n][k] of one field at one station; n in [-nt, nt], k in FFT order.
class Slice {
 public:
  Slice() = default;
  Slice(int nt, int ny) : nt_(nt), ny_(ny), c_(static_cast<std::size_t>(2 * nt + 1) * ny) {}
  explicit Slice(const Grid& g) : Slice(g.nt, g.ny) {}

  int nt() const { return nt_; }
  int ny() const { return ny_; }
  int modes() const { return 2 * nt_ + 1; }
  bool empty() const { return c_.empty(); }

  cplx* mode(int n) { return c_.data() + static_cast<std::size_t>(n + nt_) * ny_; }
  const cplx* mode(int n) const { return c_.data() + static_cast<std::size_t>(n + nt_) * ny_; }
  cplx& operator()(int n, int idx) { return mode(n)[idx]; }
  const cplx& operator()(int n, int idx) const { return mode(n)[idx]; }

  std::vector<cplx>& data() { return c_; }
  const std::vector<cplx>& data() const { return c_; }

  Slice& operator+=(const Slice& o);
  Slice& operator-=(const Slice& o);
  Slice& operator*=(double s);
  Slice& operator*=(cplx s);
  friend Slice operator+(Slice a, const Slice& b) { return a += b; }
  friend Slice operator-(Slice a, const Slice& b) { return a -= b; }
  friend Slice operator*(double s, Slice a) { return a *= s; }

  double max_abs() const;
  bool finite() const;

 private:
  int nt_ = 0, ny_ = 0;
  std::vector<cplx> c_;
};

/// One physical field over all stations.
struct SpectralField {
  std::string label;
  std::vector<Slice> at;

  SpectralField() = default;
  SpectralField(std::string lbl, const Grid& g) : label(std::move(lbl)), at(g.nx, Slice(g)) {}
  int stations() const { return static_cast<int>(at.size()); }
};

/// Grid transform f^(k) = int e^{iky} f dy and its inverse (1/2pi) int e^{-iky} f^ dk,
/// discretised as trapezoidal sums on the periodic grid.
class Transform {
 public:
  Transform(int ny, double L);
  explicit Transform(const Grid& g) : Transform(g.ny, g.L) {}

  int size() const { return n_; }
  void to_k(const cplx* y, cplx* k) const;
  void to_y(const cplx* k, cplx* y) const;
  std::vector<cplx> to_k(const std::vector<cplx>& y) const;
  std::vector<cplx> to_y(const std::vector<cplx>& k) const;

 private:
  int n_;
  double L_, dy_;
};

// ---- elementary operators ------------------------------------------------

/// Multiply by (-ik)^m.
Slice deriv_y(const Slice& f, const Grid& g, int m = 1);
/// Antisymmetric primitive; throws NonZeroMean if |M(P0 f)| > mean_tol * ||P0 f||_1.
Slice op_I(const Slice& f, const Grid& g, double mean_tol = 1e-10);
/// f(y) + f(-y).
Slice op_S(const Slice& f, const Grid& g);
/// Mean M(f_n) = f^_n(0) for every mode.
std::vector<cplx> op_M(const Slice& f);
Slice op_P(const Slice& f);
Slice op_P0(const Slice& f);
/// Symbol i sign(k), sign(0) = 0.
Slice op_hilbert(const Slice& f, const Grid& g);

/// First moment M(y f_n), by quadrature on the periodic grid.
std::vector<cplx> moment_y(const Slice& f, const Grid& g);
/// Second moment M(y^2 f_n).
std::vector<cplx> moment_y2(const Slice& f, const Grid& g);

/// Restore c[-n](k) = conj(c[n](-k)) by averaging, and clear the Nyquist column.
void enforce_reality(Slice& f, const Grid& g);
/// Largest violation of the reality constraint.
double reality_defect(const Slice& f, const Grid& g);

/// Physical profile of mode n.
std::vector<cplx> physical(const Slice& f, int n, const Transform& tr);
Slice from_physical(const std::vector<std::vector<cplx>>& modes, const Grid& g, const Transform& tr);

// ---- norms ----------------------------------------------------------------

/// (sum |f|^p dy)^{1/p}, or max |f| for p = inf; optional weight |y|^beta.
double lp_norm(const std::vector<cplx>& f, double p, double dy);
double lp_norm_weighted(const std::vector<cplx>& f, const std::vector<double>& y, double beta,
                        double p, double dy);

/// <x>^sigma sum_n || |y|^beta d_y^m f_n ||_p.
double weighted_norm(const Slice& f, const Grid& g, const Transform& tr, double p, double sigma,
                     double x, double beta = 0.0, int m = 0);

struct NormReport {
  static constexpr std::array<const char*, 10> names = {
      "u_inf", "u_q", "dyu_r", "v_inf", "v_p", "dyv_r", "w_2", "yw_2", "dyw_inf", "dyw_1"};
  std::array<double, 10> c{};
  double total() const;
};

NormReport composite_norm(const Slice& u, const Slice& v, const Slice& w, const Grid& g,
                          const Transform& tr, const Params& prm, double x);

}  // namespace wake
