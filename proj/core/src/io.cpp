#include "wake/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "wake/errors.hpp"

namespace wake {

namespace fs = std::filesystem;

namespace {

constexpr double pi = std::numbers::pi;

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

bool parse_double(const std::string& s, double& v) {
  const auto slash = s.find('/');
  if (slash != std::string::npos) {
    double a = 0, b = 0;
    if (!parse_double(trim(s.substr(0, slash)), a) || !parse_double(trim(s.substr(slash + 1)), b) || b == 0)
      return false;
    v = a / b;
    return true;
  }
  const char* end = s.data() + s.size();
  auto r = std::from_chars(s.data(), end, v);
  return r.ec == std::errc() && r.ptr == end && !s.empty();
}

template <class I>
bool parse_int(const std::string& s, I& v) {
  const char* end = s.data() + s.size();
  auto r = std::from_chars(s.data(), end, v);
  return r.ec == std::errc() && r.ptr == end && !s.empty();
}

bool parse_bool(const std::string& s, bool& v) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") return v = true, true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return v = false, true;
  return false;
}

std::ofstream open_out(const std::string& path) {
  const fs::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(p.parent_path(), ec);
    if (ec) throw io_error("cannot create " + p.parent_path().string() + ": " + ec.message());
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw io_error("cannot write " + path);
  return f;
}

void close_out(std::ofstream& f, const std::string& path) {
  f.close();
  if (!f) throw io_error("write failed: " + path);
}

std::ifstream open_in(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw io_error("cannot read " + path);
  return f;
}

void grid_header(std::ostream& o, const Grid& g) {
  o << "# ny = " << g.ny << "\n# nt = " << g.nt << "\n# L = " << num(g.L) << "\n";
}

// "# key = value" header lines of a snapshot-like file; stops at the first data line
std::map<std::string, std::string> read_header(std::istream& in, std::string& first_data, const std::string& path) {
  std::map<std::string, std::string> h;
  std::string line;
  bool tagged = false;
  while (std::getline(in, line)) {
    if (line.rfind("#", 0) != 0) {
      first_data = line;
      break;
    }
    const std::string body = trim(line.substr(1));
    if (!tagged) {
      std::istringstream ts(body);
      std::string tool, kind, ver;
      ts >> tool >> kind >> ver;
      if (tool != "wake" || ver != "v" + std::to_string(schema_version))
        throw io_error(path + ": unsupported schema '" + body + "'");
      h["kind"] = kind;
      tagged = true;
      continue;
    }
    const auto eq = body.find('=');
    if (eq != std::string::npos) h[trim(body.substr(0, eq))] = trim(body.substr(eq + 1));
  }
  if (!tagged) throw io_error(path + ": missing schema line");
  return h;
}

void check_grid(const std::map<std::string, std::string>& h, const Grid& g, const std::string& path) {
  auto get = [&](const char* k) {
    auto it = h.find(k);
    if (it == h.end()) throw io_error(path + ": header lacks " + k);
    return it->second;
  };
  if (get("ny") != std::to_string(g.ny) || get("nt") != std::to_string(g.nt) || get("L") != num(g.L))
    throw io_error(path + ": grid does not match the configuration");
}

void write_modes(std::ostream& o, const char* label, const Slice& f, const Grid& g) {
  for (int n = -g.nt; n <= g.nt; ++n)
    for (int j = -g.ny / 2; j < g.ny / 2; ++j) {
      const cplx c = f(n, g.slot(j));
      o << label << ' ' << n << ' ' << j << ' ' << num(c.real()) << ' ' << num(c.imag()) << '\n';
    }
}

// rows "field n k_index re im" into the named slices
void read_modes(std::istream& in, std::string first, const std::map<std::string, Slice*>& dst, const Grid& g,
                const std::string& path) {
  std::map<std::string, long> counts;
  std::string line = std::move(first);
  long lineno = 0;
  do {
    ++lineno;
    if (trim(line).empty()) continue;
    std::istringstream ls(line);
    std::string field, sn, sj, sre, sim;
    ls >> field >> sn >> sj >> sre >> sim;
    int n = 0, j = 0;
    double re = 0, im = 0;
    auto it = dst.find(field);
    if (it == dst.end() || !parse_int(sn, n) || !parse_int(sj, j) || !parse_double(sre, re) ||
        !parse_double(sim, im) || std::abs(n) > g.nt || j < -g.ny / 2 || j >= g.ny / 2)
      throw io_error(path + ": malformed data row " + std::to_string(lineno));
    (*it->second)(n, g.slot(j)) = cplx(re, im);
    ++counts[field];
  } while (std::getline(in, line));
  for (const auto& [name, s] : dst)
    if (counts[name] != static_cast<long>(g.ny) * g.modes()) throw io_error(path + ": incomplete field " + name);
}

}  // namespace

std::string num(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

// ============================================================================
// configuration
// ============================================================================

Mode mode_from_name(const std::string& name) {
  if (name == "solve") return Mode::solve;
  if (name == "boundary-fit") return Mode::boundary_fit;
  if (name == "extract") return Mode::extract;
  if (name == "verify-kernels") return Mode::verify_kernels;
  if (name == "linear-check") return Mode::linear_check;
  throw config_error("unknown mode '" + name + "'");
}

const char* mode_name(Mode m) {
  switch (m) {
    case Mode::solve: return "solve";
    case Mode::boundary_fit: return "boundary-fit";
    case Mode::extract: return "extract";
    case Mode::verify_kernels: return "verify-kernels";
    case Mode::linear_check: return "linear-check";
  }
  return "?";
}

namespace {

// one setter per key; false if the value does not parse
using Setter = bool (*)(RunConfig&, const std::string&);

const std::vector<std::pair<const char*, Setter>>& setters() {
#define WAKE_D(key, field) {key, [](RunConfig& c, const std::string& s) { return parse_double(s, c.field); }}
#define WAKE_I(key, field) {key, [](RunConfig& c, const std::string& s) { return parse_int(s, c.field); }}
#define WAKE_B(key, field) {key, [](RunConfig& c, const std::string& s) { return parse_bool(s, c.field); }}
  static const std::vector<std::pair<const char*, Setter>> t = {
      {"mode", [](RunConfig& c, const std::string& s) { return c.mode = mode_from_name(s), true; }},
      {"family", [](RunConfig& c, const std::string& s) { return c.family = family_from_name(s), true; }},
      WAKE_D("amplitude", amplitude),
      WAKE_I("seed", seed),
      {"out", [](RunConfig& c, const std::string& s) { return c.out = s, !s.empty(); }},
      {"input", [](RunConfig& c, const std::string& s) { return c.input = s, true; }},
      {"traces", [](RunConfig& c, const std::string& s) { return c.traces = s, true; }},
      WAKE_I("verify_points", verify_points),
      WAKE_B("snapshots", snapshots),
      WAKE_D("strouhal", prm.strouhal),
      WAKE_D("x0", prm.x0),
      WAKE_D("p", prm.p),
      WAKE_D("q", prm.q),
      WAKE_D("r", prm.r),
      WAKE_D("phi", prm.phi),
      WAKE_D("eta", prm.eta),
      WAKE_D("xi", prm.xi),
      WAKE_D("beta", prm.beta),
      WAKE_D("epsilon", prm.epsilon),
      WAKE_D("L", prm.L),
      WAKE_I("Ny", prm.Ny),
      WAKE_I("Nt", prm.Nt),
      WAKE_I("Nx", prm.Nx),
      WAKE_D("Xmax", prm.Xmax),
      WAKE_D("window_tol", prm.window_tol),
      WAKE_D("picard_tol", prm.picard_tol),
      WAKE_I("max_sweeps", prm.max_sweeps),
      WAKE_D("mean_tol", prm.mean_tol),
      WAKE_D("rho", prm.rho),
      WAKE_D("damping", prm.damping),
      WAKE_B("allow_damping", prm.allow_damping),
      WAKE_B("nonlinear", prm.nonlinear),
  };
#undef WAKE_D
#undef WAKE_I
#undef WAKE_B
  return t;
}

}  // namespace

RunConfig parse_config(std::istream& in) {
  RunConfig c;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    const std::string where = "line " + std::to_string(lineno) + ": ";
    if (eq == std::string::npos) throw config_error(where + "expected key = value");
    const std::string key = trim(body.substr(0, eq)), value = trim(body.substr(eq + 1));
    const auto& t = setters();
    auto it = std::find_if(t.begin(), t.end(), [&](const auto& e) { return key == e.first; });
    if (it == t.end()) throw config_error(where + "unknown key '" + key + "'");
    bool ok = false;
    try {
      ok = it->second(c, value);
    } catch (const Error& e) {
      throw config_error(where + e.what());
    }
    if (!ok) throw config_error(where + "bad value '" + value + "' for " + key);
  }
  if (c.verify_points < 2) throw config_error("verify_points must be >= 2");
  validate(c.prm);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw io_error("cannot read " + path);
  return parse_config(f);
}

std::string format_config(const RunConfig& c) {
  std::ostringstream o;
  const Params& p = c.prm;
  auto b = [](bool v) { return v ? "true" : "false"; };
  o << "mode = " << mode_name(c.mode) << "\nfamily = " << family_name(c.family) << "\namplitude = " << num(c.amplitude)
    << "\nseed = " << c.seed << "\nout = " << c.out << "\n";
  if (!c.input.empty()) o << "input = " << c.input << "\n";
  if (!c.traces.empty()) o << "traces = " << c.traces << "\n";
  o << "verify_points = " << c.verify_points << "\nsnapshots = " << b(c.snapshots) << "\nstrouhal = " << num(p.strouhal)
    << "\nx0 = " << num(p.x0) << "\np = " << num(p.p) << "\nq = " << num(p.q) << "\nr = " << num(p.r)
    << "\nphi = " << num(p.phi) << "\neta = " << num(p.eta) << "\nxi = " << num(p.xi) << "\nbeta = " << num(p.beta)
    << "\nepsilon = " << num(p.epsilon) << "\nL = " << num(p.L) << "\nNy = " << p.Ny << "\nNt = " << p.Nt
    << "\nNx = " << p.Nx << "\nXmax = " << num(p.Xmax) << "\nwindow_tol = " << num(p.window_tol)
    << "\npicard_tol = " << num(p.picard_tol) << "\nmax_sweeps = " << p.max_sweeps << "\nmean_tol = " << num(p.mean_tol)
    << "\nrho = " << num(p.rho) << "\ndamping = " << num(p.damping) << "\nallow_damping = " << b(p.allow_damping)
    << "\nnonlinear = " << b(p.nonlinear) << "\n";
  return o.str();
}

// ============================================================================
// snapshots and reports
// ============================================================================

void write_snapshot(const std::string& path, int station, double x, const Slice& u, const Slice& v,
                    const Slice& w, const Grid& g) {
  auto f = open_out(path);
  f << "# wake snapshot v" << schema_version << "\n# station = " << station << "\n# x = " << num(x) << "\n";
  grid_header(f, g);
  f << "# k = pi * k_index / L\n# columns: field n k_index re im\n";
  write_modes(f, "u", u, g);
  write_modes(f, "v", v, g);
  write_modes(f, "w", w, g);
  close_out(f, path);
}

void write_snapshot_y(const std::string& path, int station, double x, const Slice& u, const Slice& v,
                      const Slice& w, const Grid& g) {
  const Transform tr(g);
  auto f = open_out(path);
  f << "# wake snapshot-y v" << schema_version << "\n# station = " << station << "\n# x = " << num(x) << "\n";
  grid_header(f, g);
  f << "# columns: n y u_re u_im v_re v_im w_re w_im\n";
  for (int n = -g.nt; n <= g.nt; ++n) {
    const auto pu = physical(u, n, tr), pv = physical(v, n, tr), pw = physical(w, n, tr);
    for (int m = 0; m < g.ny; ++m)
      f << n << ' ' << num(g.y[m]) << ' ' << num(pu[m].real()) << ' ' << num(pu[m].imag()) << ' ' << num(pv[m].real())
        << ' ' << num(pv[m].imag()) << ' ' << num(pw[m].real()) << ' ' << num(pw[m].imag()) << '\n';
  }
  close_out(f, path);
}

double read_snapshot(const std::string& path, const Grid& g, Slice& u, Slice& v, Slice& w) {
  auto f = open_in(path);
  std::string first;
  const auto h = read_header(f, first, path);
  if (h.at("kind") != "snapshot") throw io_error(path + ": not a snapshot");
  check_grid(h, g, path);
  double x = 0;
  if (!h.count("x") || !parse_double(h.at("x"), x)) throw io_error(path + ": header lacks x");
  u = Slice(g);
  v = Slice(g);
  w = Slice(g);
  read_modes(f, first, {{"u", &u}, {"v", &v}, {"w", &w}}, g, path);
  return x;
}

void write_boundary(const std::string& path, const BoundaryData& b, const Grid& g) {
  auto f = open_out(path);
  f << "# wake boundary v" << schema_version << "\n";
  grid_header(f, g);
  f << "# k = pi * k_index / L\n# columns: field n k_index re im\n";
  write_modes(f, "w", b.w, g);
  write_modes(f, "nu", b.nu, g);
  write_modes(f, "mu", b.mu, g);
  close_out(f, path);
}

BoundaryData read_boundary(const std::string& path, const Grid& g) {
  auto f = open_in(path);
  std::string first;
  const auto h = read_header(f, first, path);
  if (h.at("kind") != "boundary") throw io_error(path + ": not a boundary file");
  check_grid(h, g, path);
  BoundaryData b(g);
  read_modes(f, first, {{"w", &b.w}, {"nu", &b.nu}, {"mu", &b.mu}}, g, path);
  return b;
}

void write_norms_csv(const std::string& path, const FlowState& s, const Grid& g, const Params& prm) {
  const Transform tr(g);
  auto f = open_out(path);
  f << "station,x";
  for (const char* n : NormReport::names) f << ',' << n;
  f << ",total\n";
  for (int j = 0; j < g.nx; ++j) {
    const NormReport r = composite_norm(s.u[j], s.v[j], s.w[j], g, tr, prm, g.x[j]);
    f << j << ',' << num(g.x[j]);
    for (double c : r.c) f << ',' << num(c);
    f << ',' << num(r.total()) << '\n';
  }
  close_out(f, path);
}

void write_coeffs(const std::string& path, const AsymptoticCoeffs& c, const DecayFit& d, const A1Diagnostic& a) {
  auto f = open_out(path);
  auto kv = [&](const std::string& k, double v) { f << k << " = " << num(v) << '\n'; };
  f << "# wake coeffs v" << schema_version << "\n";
  kv("a1", c.a1);
  for (int n = -c.nt(); n <= c.nt(); ++n) {
    const std::string idx = "[" + std::to_string(n) + "]";
    kv("a2" + idx + ".re", c.a2_mode(n).real());
    kv("a2" + idx + ".im", c.a2_mode(n).imag());
    kv("a3" + idx + ".re", c.a3_mode(n).real());
    kv("a3" + idx + ".im", c.a3_mode(n).imag());
  }
  kv("a4", c.a4);
  kv("a4.pieces", c.a4_pieces.sum());
  kv("a4.pieces.w", c.a4_pieces.w);
  kv("a4.pieces.uv", c.a4_pieces.uv);
  kv("a4.pieces.q", c.a4_pieces.q);
  kv("a4.pieces.log", c.a4_pieces.log);
  f << "a4.pieces.q_tail_ok = " << (c.a4_pieces.q_tail_ok ? "true" : "false") << '\n';
  kv("a4.discrepancy", c.a4_discrepancy);
  kv("a5", c.a5);
  kv("a6", c.a6);
  kv("q_integral", c.q_integral);
  kv("q_integral_defect", c.q_integral_defect);
  kv("mass_relation", c.mass_relation);
  kv("a2_time_variation", c.a2_time_variation);
  kv("a3_time_variation", c.a3_time_variation);
  // conjectural identification: drag = -2 P0 a2, lift = -2 P0 a3
  kv("drag_conjectural", -2.0 * c.a2_mode(0).real());
  kv("lift_conjectural", -2.0 * c.a3_mode(0).real());
  f << "decay.degenerate = " << (d.degenerate ? "true" : "false") << '\n';
  kv("decay.u_inf", d.u_inf);
  kv("decay.v_inf", d.v_inf);
  kv("decay.w_inf", d.w_inf);
  kv("decay.w_1", d.w_1);
  kv("decay.w_weighted", d.w_weighted);
  kv("decay.u_first", d.u_first);
  kv("decay.pred_u", d.pred_u);
  kv("decay.pred_v", d.pred_v);
  kv("decay.pred_w_inf", d.pred_w_inf);
  kv("decay.pred_w_1", d.pred_w_1);
  kv("decay.pred_u_first", d.pred_u_first);
  kv("a1_tilde.mean", a.mean);
  kv("a1_tilde.variation", a.variation);
  kv("a1_tilde.cross_defect", a.cross_defect);
  kv("a1_tilde.mean_defect", a.mean_defect);
  close_out(f, path);
}

void write_verify(const std::string& path, const std::vector<BoundCheck>& checks) {
  auto f = open_out(path);
  f << "# wake verify v" << schema_version << "\n";
  f << "lemma\tquantity\tenvelope\tC\ttrend_end\ttrend_start\tmargin\tpass\n";
  for (const BoundCheck& c : checks)
    f << c.lemma << '\t' << c.quantity << '\t' << c.envelope << '\t' << num(c.C) << '\t' << num(c.trend_end) << '\t'
      << num(c.trend_start) << '\t' << num(c.margin) << '\t' << (c.pass ? "PASS" : "FAIL") << '\n';
  close_out(f, path);
}

// ============================================================================
// external traces
// ============================================================================

Traces resample_trace(const std::string& path, const Grid& g) {
  auto f = open_in(path);
  return resample_trace(f, g);
}

Traces resample_trace(std::istream& in, const Grid& g) {
  // rows grouped per mode; samples of one mode must be uniform and increasing
  std::map<int, std::vector<std::array<double, 7>>> rows;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string body = trim(line);
    if (body.empty() || body[0] == '#') continue;
    std::istringstream ls(body);
    int n = 0;
    std::array<double, 7> r{};
    std::string tok;
    bool ok = static_cast<bool>(ls >> tok) && parse_int(tok, n);
    for (double& v : r) ok = ok && static_cast<bool>(ls >> tok) && parse_double(tok, v);
    if (!ok) throw io_error("trace row " + std::to_string(lineno) + " is malformed");
    if (std::abs(n) > g.nt) continue;  // modes the grid does not carry
    rows[n].push_back(r);
  }
  if (!rows.count(0)) throw precondition("Traces", "no stationary mode in the trace file");

  Traces t;
  t.u = Slice(g);
  t.v = Slice(g);
  t.w = Slice(g);
  const Transform tr(g);
  bool all_on_grid = true;
  for (auto& [n, r] : rows) {
    const std::size_t m = r.size();
    if (m < 4) throw precondition("Traces", "too few samples for mode " + std::to_string(n));
    for (std::size_t i = 1; i < m; ++i)
      if (!(r[i][0] > r[i - 1][0])) throw precondition("Traces", "non-monotone y samples in mode " + std::to_string(n));
    const double y0 = r.front()[0], y1 = r.back()[0], h = (y1 - y0) / static_cast<double>(m - 1);
    for (std::size_t i = 1; i < m; ++i)
      if (std::abs(r[i][0] - r[i - 1][0] - h) > 1e-9 * h)
        throw precondition("Traces", "y samples are not uniformly spaced in mode " + std::to_string(n));
    if (y1 - y0 < g.L / 2 || y0 > 0 || y1 < 0)
      throw precondition("Traces", "samples span [" + num(y0) + ", " + num(y1) + "]; need at least L/2 around y = 0");

    // on-grid input is copied as is
    bool on_grid = std::abs(h - g.dy) <= 1e-12 * g.dy && m == static_cast<std::size_t>(g.ny);
    for (std::size_t i = 0; on_grid && i < m; ++i) on_grid = std::abs(r[i][0] - g.y[i]) <= 1e-9 * g.dy;
    all_on_grid = all_on_grid && on_grid;

    std::array<std::vector<cplx>, 3> phys;
    for (int c = 0; c < 3; ++c) {
      std::vector<cplx> f(m);
      for (std::size_t i = 0; i < m; ++i) f[i] = cplx(r[i][1 + 2 * c], r[i][2 + 2 * c]);
      if (on_grid) {
        phys[c] = std::move(f);
        continue;
      }
      double peak = 0;
      for (const cplx& z : f) peak = std::max(peak, std::abs(z));
      // cosine taper on the outer 5% of each end
      const double edge = 0.05 * (y1 - y0);
      double defect = 0;
      for (std::size_t i = 0; i < m; ++i) {
        const double d = std::min(r[i][0] - y0, y1 - r[i][0]);
        if (d < edge) {
          const double wgt = 0.5 - 0.5 * std::cos(pi * d / edge);
          defect = std::max(defect, std::abs(f[i]) * (1.0 - wgt));
          f[i] *= wgt;
        }
      }
      if (peak > 0) t.taper_defect = std::max(t.taper_defect, defect / peak);
      // trigonometric interpolant of the tapered samples on a period padded to twice the span
      const int M = [&] {
        int p = 1;
        while (p < static_cast<int>(2 * m)) p *= 2;
        return p;
      }();
      const double P = M * h;
      std::vector<cplx> pad(M, 0.0);
      std::copy(f.begin(), f.end(), pad.begin());
      const Transform big(M, P / 2);
      const std::vector<cplx> F = big.to_k(pad);  // F_j = h sum f_i e^{i k_j (y_i - y0 - P/2)}
      double fpeak = 0, tail = 0;
      for (int j = 0; j < M; ++j) {
        const int s = j < M / 2 ? j : j - M;
        const double k = 2 * pi * s / P;
        fpeak = std::max(fpeak, std::abs(F[j]));
        if (std::abs(k) >= pi / g.dy) tail = std::max(tail, std::abs(F[j]));
      }
      if (fpeak > 0) t.spectral_tail = std::max(t.spectral_tail, tail / fpeak);
      // evaluate on the grid points inside the sampled span; the field is taken as zero outside
      std::vector<cplx> out(g.ny, 0.0);
      for (int i = 0; i < g.ny; ++i) {
        const double y = g.y[i];
        if (y < y0 || y > y1) continue;
        // sum_s F_s z^s with z = e^{-i 2 pi (y - y0 - P/2) / P}, Nyquist split evenly
        const cplx z = std::exp(cplx(0.0, -2 * pi * (y - y0 - P / 2) / P)), zi = std::conj(z);
        cplx acc = F[0], up = 1.0, down = 1.0;
        for (int s = 1; s < M / 2; ++s) {
          up *= z;
          down *= zi;
          acc += F[s] * up + F[M - s] * down;
        }
        acc += 0.5 * F[M / 2] * (up * z + down * zi);
        out[i] = acc / P;
      }
      phys[c] = std::move(out);
    }
    const auto ku = tr.to_k(phys[0]), kv = tr.to_k(phys[1]), kw = tr.to_k(phys[2]);
    std::copy(ku.begin(), ku.end(), t.u.mode(n));
    std::copy(kv.begin(), kv.end(), t.v.mode(n));
    std::copy(kw.begin(), kw.end(), t.w.mode(n));
  }
  for (Slice* s : {&t.u, &t.v, &t.w})
    for (int n = -g.nt; n <= g.nt; ++n) (*s)(n, g.nyquist()) = 0.0;
  t.on_grid = all_on_grid;
  return t;
}

// ============================================================================
// orchestration
// ============================================================================

namespace {

std::string station_name(int j) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "station_%04d", j);
  return buf;
}

void write_state(const fs::path& dir, const FlowState& s, const Grid& g) {
  for (int j = 0; j < g.nx; ++j) {
    write_snapshot((dir / "snapshots" / (station_name(j) + ".txt")).string(), j, g.x[j], s.u[j], s.v[j], s.w[j], g);
    write_snapshot_y((dir / "snapshots" / (station_name(j) + "_y.txt")).string(), j, g.x[j], s.u[j], s.v[j], s.w[j],
                     g);
  }
}

FlowState read_state(const fs::path& dir, const Grid& g) {
  FlowState s(g);
  for (int j = 0; j < g.nx; ++j) {
    const double x = read_snapshot((dir / "snapshots" / (station_name(j) + ".txt")).string(), g, s.u[j], s.v[j], s.w[j]);
    if (num(x) != num(g.x[j])) throw io_error("station " + std::to_string(j) + " does not match the configuration");
  }
  return s;
}

void extract_and_write(const fs::path& dir, const BoundaryData& b, const FlowState& s, const DuhamelMap& map) {
  const Grid& g = map.grid();
  const Params& prm = map.params();
  const AsymptoticCoeffs c = extract_coeffs(b, s, map);
  const double from = std::min(4.0 * prm.x0, g.x.back() / 2);
  const DecayFit d = decay_fit(s, c, g, prm, from, g.x.back());
  const A1Diagnostic a = a1_diagnostic(s, map);
  write_coeffs((dir / "coeffs.txt").string(), c, d, a);
}

double max_rel_difference(const FlowState& a, const FlowState& b) {
  double diff = 0, ref = 0;
  for (std::size_t j = 0; j < a.u.size(); ++j)
    for (auto [x, y] : {std::pair{&a.u[j], &b.u[j]}, {&a.v[j], &b.v[j]}, {&a.w[j], &b.w[j]}}) {
      diff = std::max(diff, (*x - *y).max_abs());
      ref = std::max(ref, y->max_abs());
    }
  return ref > 0 ? diff / ref : diff;
}

}  // namespace

int run(const RunConfig& c, std::ostream& log, std::ostream& err, bool quiet) {
  try {
    const fs::path dir(c.out);
    auto say = [&](const std::string& s) {
      if (!quiet) log << s << '\n';
    };
    {
      auto f = open_out((dir / "config.txt").string());
      f << format_config(c);
      close_out(f, (dir / "config.txt").string());
    }
    std::ostringstream report;
    report << "# wake run v" << schema_version << "\nmode = " << mode_name(c.mode) << '\n';

    if (c.mode == Mode::verify_kernels) {
      VerifyOptions o;
      o.strouhal = c.prm.strouhal > 0 ? c.prm.strouhal : 1.0;
      for (int i = 0; i < c.verify_points; ++i) o.x.push_back(std::pow(10.0, -2.0 + 4.0 * i / (c.verify_points - 1)));
      const std::vector<BoundCheck> checks = run_verification(o);
      write_verify((dir / "verify.tsv").string(), checks);
      const auto passed = std::count_if(checks.begin(), checks.end(), [](const BoundCheck& b) { return b.pass; });
      report << "checks = " << checks.size() << "\npassed = " << passed << '\n';
      say("verify-kernels: " + std::to_string(passed) + " of " + std::to_string(checks.size()) + " checks pass");
    } else {
      Params prm = c.prm;
      if (c.mode == Mode::linear_check) prm.nonlinear = false;
      const Grid g = Grid::make(prm);
      const DuhamelMap map(g, prm);

      if (c.mode == Mode::extract) {
        if (c.input.empty()) throw config_error("extract needs input = DIR (the output of a solve)");
        const fs::path in(c.input);
        const BoundaryData b = read_boundary((in / "boundary.txt").string(), g);
        const FlowState s = read_state(in, g);
        extract_and_write(dir, b, s, map);
        say("extract: coefficients from " + c.input);
      } else {
        const BoundaryData b = make_boundary(c.family, c.amplitude, c.seed, g, prm);
        const FlowState s = picard_solve(b, map);
        report << "sweeps = " << s.sweeps << "\ndamped = " << (s.damped ? "true" : "false") << '\n';
        for (std::size_t i = 0; i < s.ratios.size(); ++i) report << "ratio[" << i << "] = " << num(s.ratios[i]) << '\n';
        write_boundary((dir / "boundary.txt").string(), b, g);
        if (c.snapshots) write_state(dir, s, g);
        write_norms_csv((dir / "norms.csv").string(), s, g, prm);
        say(std::string(mode_name(c.mode)) + ": converged in " + std::to_string(s.sweeps) + " sweeps");

        if (c.mode == Mode::solve) extract_and_write(dir, b, s, map);
        if (c.mode == Mode::linear_check) {
          const double e = max_rel_difference(s, map.linear(b));
          report << "linear_error = " << num(e) << "\nlinear_check = " << (e < 1e-10 ? "PASS" : "FAIL") << '\n';
          say("linear-check: relative difference " + num(e));
        }
        if (c.mode == Mode::boundary_fit) {
          Slice ub = s.u[0], vb = s.v[0], wb = s.w[0];
          if (!c.traces.empty()) {
            const Traces t = resample_trace(c.traces, g);
            ub = t.u;
            vb = t.v;
            wb = t.w;
            report << "traces.taper_defect = " << num(t.taper_defect) << "\ntraces.spectral_tail = "
                   << num(t.spectral_tail) << "\ntraces.on_grid = " << (t.on_grid ? "true" : "false") << '\n';
          }
          const BoundaryFit fit = boundary_fit(ub, vb, wb, map);
          write_boundary((dir / "boundary_fit.txt").string(), fit.data, g);
          const double ew = (fit.data.w - b.w).max_abs() / std::max(b.w.max_abs(), 1e-300);
          const double en = (fit.data.nu - b.nu).max_abs() / std::max(b.nu.max_abs(), 1e-300);
          report << "fit.outer = " << fit.outer << "\nfit.residual = " << num(fit.residual)
                 << "\nfit.w_error = " << num(ew) << "\nfit.nu_error = " << num(en) << '\n';
          say("boundary-fit: residual " + num(fit.residual) + ", w error " + num(ew) + ", nu error " + num(en));
        }
      }
    }
    auto f = open_out((dir / "run.txt").string());
    f << report.str();
    close_out(f, (dir / "run.txt").string());
    return 0;
  } catch (const Error& e) {
    err << "error class=" << class_name(e.error_class()) << " " << e.what() << '\n';
    return exit_code(e.error_class());
  }
}

}  // namespace wake
