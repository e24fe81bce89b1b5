#pragma once

#include <cmath>
#include <string>
#include <vector>

namespace wake {

/// Japanese bracket <x> = sqrt(1 + x^2).
inline double jb(double x) { return std::sqrt(1.0 + x * x); }

struct Params {
  double strouhal = 0.0;
  double x0 = 20.0;

  // function-space exponents
  double p = 32.0 / 31.0;  // 1 / (1 - epsilon phi)
  double q = 2.0;
  double r = 3.0;
  double phi = 1.0 / 16.0;
  double eta = 1.0 / 100.0;
  double xi = 1.0 / 16.0;
  double beta = 2.0;
  double epsilon = 0.5;  ///< phi0 = (1 + epsilon) phi

  // grids
  double L = 400.0;
  int Ny = 512;
  int Nt = 0;
  int Nx = 160;
  double Xmax = 2000.0;

  // tolerances and iteration control
  double window_tol = 1e-10;
  double picard_tol = 1e-11;
  int max_sweeps = 60;
  double mean_tol = 1e-10;  ///< relative to the L1 norm of the mode
  double rho = 1e6;         ///< admissible boundary-norm radius
  double damping = 1.0;     ///< under-relaxation engaged after a non-contractive signal
  bool allow_damping = false;
  bool nonlinear = true;

  double phi0() const { return (1.0 + epsilon) * phi; }
};

struct Restriction {
  std::string text;
  double slack;  ///< >= 0 (or > 0 for strict ones) when satisfied
  bool strict;
  bool ok() const { return strict ? slack > 0.0 : slack >= 0.0; }
};

/// Every inequality of the admissible exponent system, evaluated by substitution.
std::vector<Restriction> restrictions(const Params& prm);
bool restrictions_hold(const Params& prm, std::string* why = nullptr);

/// Throws a precondition error if exponents or grid settings are inadmissible.
void validate(const Params& prm);

/// Uniform y grid on [-L, L), FFT-ordered wavenumbers, log-uniform stations.
struct Grid {
  int ny = 0, nt = 0, nx = 0;
  double L = 0, dy = 0, dk = 0;
  std::vector<double> y, k, x;

  static Grid make(const Params& prm);
  static Grid make(int ny, int nt, double L, std::vector<double> stations);

  int modes() const { return 2 * nt + 1; }
  /// Signed index j of FFT slot idx, with k = pi j / L.
  int signed_index(int idx) const { return idx < ny / 2 ? idx : idx - ny; }
  int slot(int j) const { return j >= 0 ? j : j + ny; }
  int mirror(int idx) const { return idx == 0 ? 0 : ny - idx; }
  int nyquist() const { return ny / 2; }
};

std::vector<double> log_stations(double x0, double xmax, int nx);

}  // namespace wake
