#include "wake/params.hpp"

#include <sstream>

#include "wake/errors.hpp"

namespace wake {

std::vector<Restriction> restrictions(const Params& prm) {
  const double p = prm.p, q = prm.q, r = prm.r, phi = prm.phi, eta = prm.eta, xi = prm.xi,
               beta = prm.beta;
  std::vector<Restriction> out = {
      {"13/7 <= beta", beta - 13.0 / 7.0, false},
      {"beta <= 3", 3.0 - beta, false},
      {"1 - 1/p < phi", phi - (1.0 - 1.0 / p), true},
      {"phi < 1/2", 0.5 - phi, true},
      {"1 < p", p - 1.0, true},
      {"p <= q", q - p, false},
      {"r > 2", r - 2.0, true},
      {"xi <= 1/2", 0.5 - xi, false},
      {"eta <= xi", xi - eta, false},
      {"eta >= 0", eta, false},
      {"xi >= phi", xi - phi, false},
      {"1/4 - phi/2 - eta > 0", 0.25 - phi / 2.0 - eta, true},
      {"1/2 - (1 + 1/(2r)) phi > 0", 0.5 - (1.0 + 1.0 / (2.0 * r)) * phi, true},
      {"1/2 + xi - eta - 2 phi > 0", 0.5 + xi - eta - 2.0 * phi, true},
      {"1/2 + eta - xi - phi/r > 0", 0.5 + eta - xi - phi / r, true},
  };
  if (prm.strouhal > 0.0)
    out.push_back({"<S>/S <= <x0>^phi",
                   std::pow(jb(prm.x0), phi) - jb(prm.strouhal) / prm.strouhal, false});
  return out;
}

bool restrictions_hold(const Params& prm, std::string* why) {
  bool ok = true;
  std::ostringstream os;
  for (const auto& c : restrictions(prm)) {
    if (!c.ok()) {
      ok = false;
      os << (os.tellp() > 0 ? "; " : "") << c.text << " (slack " << c.slack << ")";
    }
  }
  if (why) *why = os.str();
  return ok;
}

void validate(const Params& prm) {
  std::string why;
  if (!restrictions_hold(prm, &why)) throw precondition("Restrictions", why);
  if (prm.strouhal < 0.0) throw precondition("Params", "strouhal must be >= 0");
  if (prm.strouhal == 0.0 && prm.Nt != 0) throw precondition("Params", "Nt must be 0 when S = 0");
  if (prm.Nt < 0) throw precondition("Params", "Nt must be >= 0");
  if (prm.Ny < 4 || prm.Ny % 2 != 0) throw precondition("Params", "Ny must be even and >= 4");
  if (prm.x0 < 1.0) throw precondition("Params", "x0 must be >= 1");
  if (prm.Nx < 2 || !(prm.Xmax > prm.x0)) throw precondition("Params", "need Nx >= 2 and Xmax > x0");
  if (!(prm.L > 0.0)) throw precondition("Params", "L must be positive");
  if (!(prm.window_tol > 0.0 && prm.window_tol < 1.0))
    throw precondition("Params", "window_tol must lie in (0, 1)");
  if (prm.max_sweeps < 1) throw precondition("Params", "max_sweeps must be >= 1");
}

std::vector<double> log_stations(double x0, double xmax, int nx) {
  std::vector<double> x(nx);
  const double lr = std::log(xmax / x0);
  for (int i = 0; i < nx; ++i) x[i] = x0 * std::exp(lr * i / (nx - 1));
  x.front() = x0;
  x.back() = xmax;
  return x;
}

Grid Grid::make(const Params& prm) {
  return make(prm.Ny, prm.Nt, prm.L, log_stations(prm.x0, prm.Xmax, prm.Nx));
}

Grid Grid::make(int ny, int nt, double L, std::vector<double> stations) {
  if (ny < 2 || ny % 2) throw precondition("Grid", "Ny must be even");
  for (std::size_t i = 1; i < stations.size(); ++i)
    if (!(stations[i] > stations[i - 1])) throw precondition("Grid", "stations must increase");
  Grid g;
  g.ny = ny;
  g.nt = nt;
  g.nx = static_cast<int>(stations.size());
  g.L = L;
  g.dy = 2.0 * L / ny;
  g.dk = M_PI / L;
  g.y.resize(ny);
  g.k.resize(ny);
  for (int m = 0; m < ny; ++m) g.y[m] = -L + m * g.dy;
  for (int i = 0; i < ny; ++i) g.k[i] = g.dk * g.signed_index(i);
  g.x = std::move(stations);
  return g;
}

}  // namespace wake
