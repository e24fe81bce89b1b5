#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "wake/errors.hpp"
#include "wake/io.hpp"

using namespace wake;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("wake_io_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

ErrorClass parse_error_class(const std::string& text, std::string* what = nullptr) {
  std::istringstream in(text);
  try {
    parse_config(in);
  } catch (const Error& e) {
    if (what) *what = e.what();
    return e.error_class();
  }
  ADD_FAILURE() << "no error for: " << text;
  return ErrorClass::io;
}

RunConfig small_config(Mode m, const fs::path& out) {
  RunConfig c;
  c.mode = m;
  c.out = out.string();
  c.prm.Ny = 128;
  c.prm.Nx = 16;
  c.prm.L = 200;
  c.prm.Xmax = 400;
  c.prm.strouhal = 2;
  c.prm.Nt = 1;
  return c;
}

}  // namespace

TEST(Config, CanonicalFormRoundTrips) {
  RunConfig c;
  c.mode = Mode::boundary_fit;
  c.family = BoundaryFamily::symmetric_wake;
  c.amplitude = 0.0125;
  c.seed = 99;
  c.prm.phi = 1.0 / 17.0;
  c.prm.Nt = 2;
  c.prm.strouhal = 2.0;
  c.prm.allow_damping = true;
  std::istringstream in(format_config(c));
  const RunConfig r = parse_config(in);
  EXPECT_EQ(format_config(r), format_config(c));
  EXPECT_EQ(r.prm.phi, c.prm.phi);
  EXPECT_EQ(r.seed, 99u);
}

TEST(Config, FractionsAndComments) {
  std::istringstream in("# exponents\nphi = 1/16   # trailing comment\n\nxi=1/16\nmode = verify-kernels\n");
  const RunConfig c = parse_config(in);
  EXPECT_EQ(c.prm.phi, 1.0 / 16.0);
  EXPECT_EQ(c.mode, Mode::verify_kernels);
}

TEST(Config, ErrorsNameTheLine) {
  std::string what;
  EXPECT_EQ(parse_error_class("Ny = 64\n\nbogus = 1\n", &what), ErrorClass::config);
  EXPECT_NE(what.find("line 3"), std::string::npos) << what;
  EXPECT_NE(what.find("bogus"), std::string::npos);
  EXPECT_EQ(parse_error_class("Ny 64\n", &what), ErrorClass::config);
  EXPECT_NE(what.find("line 1"), std::string::npos);
  EXPECT_EQ(parse_error_class("Ny = 6.5\n", &what), ErrorClass::config);
  EXPECT_EQ(parse_error_class("x0 = 1/0\n", &what), ErrorClass::config);
  EXPECT_EQ(parse_error_class("\nmode = draw\n", &what), ErrorClass::config);
  EXPECT_NE(what.find("line 2"), std::string::npos);
}

TEST(Config, RestrictionsAreCheckedAtLoad) {
  EXPECT_EQ(parse_error_class("phi = 0.6\n"), ErrorClass::precondition);
  EXPECT_EQ(parse_error_class("Nt = 2\n"), ErrorClass::precondition);  // S = 0 carries no temporal modes
}

TEST(Numbers, ShortestFormReadsBack) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int i = 0; i < 2000; ++i) {
    const double v = u(rng) * std::pow(10.0, 40 * u(rng));
    EXPECT_EQ(std::stod(num(v)), v);
  }
  EXPECT_EQ(num(0.0), "0");
  EXPECT_EQ(num(0.5), "0.5");
}

TEST(Snapshots, RoundTripIsBitExact) {
  const Grid g = Grid::make(32, 2, 50.0, {20.0, 30.0});
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  Slice u(g), v(g), w(g);
  for (Slice* s : {&u, &v, &w})
    for (auto& c : s->data()) c = cplx(nd(rng), nd(rng)) * std::exp(3 * nd(rng));
  const fs::path p = scratch("snap") / "s.txt";
  write_snapshot(p.string(), 1, 30.0, u, v, w, g);
  Slice ru, rv, rw;
  EXPECT_EQ(read_snapshot(p.string(), g, ru, rv, rw), 30.0);
  EXPECT_EQ(ru.data(), u.data());
  EXPECT_EQ(rv.data(), v.data());
  EXPECT_EQ(rw.data(), w.data());
  const Grid other = Grid::make(64, 2, 50.0, {20.0});
  EXPECT_THROW(read_snapshot(p.string(), other, ru, rv, rw), Error);
}

TEST(Traces, OnGridInputIsCopied) {
  const Grid g = Grid::make(64, 0, 40.0, {20.0});
  std::ostringstream o;
  std::vector<double> f(g.ny);
  for (int m = 0; m < g.ny; ++m) {
    f[m] = std::exp(-g.y[m] * g.y[m] / 40.0) * (1.0 + 0.1 * g.y[m]);  // resolved: no Nyquist content
    o << "0 " << num(g.y[m]) << ' ' << num(f[m]) << " 0 " << num(2 * f[m]) << " 0 " << num(-f[m]) << " 0\n";
  }
  std::istringstream in(o.str());
  const Traces t = resample_trace(in, g);
  EXPECT_TRUE(t.on_grid);
  const Transform tr(g);
  const auto u = physical(t.u, 0, tr), v = physical(t.v, 0, tr);
  for (int m = 0; m < g.ny; ++m) {
    EXPECT_NEAR(u[m].real(), f[m], 1e-15);
    EXPECT_NEAR(v[m].real(), 2 * f[m], 2e-15);
  }
}

TEST(Traces, GaussianAtTripleDensity) {
  // exp(-y^2/8): band-limited to far below the sample Nyquist, negligible at the tapered ends
  const Grid g = Grid::make(256, 0, 50.0, {20.0});
  const double h = g.dy / 3.0;
  std::ostringstream o;
  for (int i = 0; i <= 600; ++i) {
    const double y = -40.0 + 0.25 * h + i * h;  // deliberately off the grid
    const double f = std::exp(-y * y / 8.0);
    o << "0 " << num(y) << ' ' << num(f) << " 0 0 0 " << num(y * f) << " 0\n";
  }
  std::istringstream in(o.str());
  const Traces t = resample_trace(in, g);
  EXPECT_FALSE(t.on_grid);
  EXPECT_LT(t.taper_defect, 1e-50);
  const Transform tr(g);
  const auto u = physical(t.u, 0, tr), w = physical(t.w, 0, tr);
  double err = 0;
  for (int m = 0; m < g.ny; ++m) {
    const double y = g.y[m], f = std::exp(-y * y / 8.0);
    err = std::max({err, std::abs(u[m] - f), std::abs(w[m] - y * f)});
  }
  EXPECT_LT(err, 1e-10);
}

TEST(Traces, RejectsShortSpanAndDisorder) {
  const Grid g = Grid::make(64, 0, 40.0, {20.0});
  auto rows = [](double a, double b, int n, bool shuffle) {
    std::ostringstream o;
    for (int i = 0; i < n; ++i) {
      const int j = (shuffle && i == 3) ? 4 : (shuffle && i == 4) ? 3 : i;
      o << "0 " << num(a + (b - a) * j / (n - 1)) << " 1 0 0 0 0 0\n";
    }
    return o.str();
  };
  auto cls = [&](const std::string& text) {
    std::istringstream in(text);
    try {
      resample_trace(in, g);
    } catch (const Error& e) {
      return e.error_class();
    }
    return ErrorClass::io;
  };
  EXPECT_EQ(cls(rows(-9.0, 9.0, 50, false)), ErrorClass::precondition);  // span 18 < L/2
  EXPECT_EQ(cls(rows(-30.0, 30.0, 50, true)), ErrorClass::precondition);
  EXPECT_EQ(cls("0 1 2 oops\n"), ErrorClass::io);
}

TEST(Run, ZeroLinearCheckMatchesGoldenFiles) {
  const fs::path out = scratch("golden");
  RunConfig c;
  c.mode = Mode::linear_check;
  c.amplitude = 0;
  c.prm.Ny = 16;
  c.prm.Nx = 3;
  c.prm.L = 20;
  c.prm.Xmax = 40;
  c.out = out.string();
  std::ostringstream log, err;
  ASSERT_EQ(run(c, log, err, true), 0) << err.str();
  const fs::path golden(WAKE_GOLDEN_DIR "/zero");
  int files = 0;
  for (const auto& e : fs::recursive_directory_iterator(golden)) {
    if (!e.is_regular_file()) continue;
    ++files;
    const fs::path rel = fs::relative(e.path(), golden);
    EXPECT_EQ(slurp(out / rel), slurp(e.path())) << rel;
  }
  EXPECT_EQ(files, 9);
  std::ifstream cfg(out / "config.txt");
  EXPECT_EQ(format_config(parse_config(cfg)), format_config(c));
}

TEST(Run, ExtractFromSnapshotsIsBitForBit) {
  const fs::path a = scratch("solve"), b = scratch("extract");
  std::ostringstream log, err;
  ASSERT_EQ(run(small_config(Mode::solve, a), log, err, true), 0) << err.str();
  RunConfig e = small_config(Mode::extract, b);
  e.input = a.string();
  ASSERT_EQ(run(e, log, err, true), 0) << err.str();
  const std::string ca = slurp(a / "coeffs.txt");
  EXPECT_GT(ca.size(), 500u);
  EXPECT_EQ(ca, slurp(b / "coeffs.txt"));
  // and the solve itself is deterministic
  const fs::path a2 = scratch("solve2");
  ASSERT_EQ(run(small_config(Mode::solve, a2), log, err, true), 0);
  EXPECT_EQ(slurp(a / "norms.csv"), slurp(a2 / "norms.csv"));
  EXPECT_EQ(slurp(a / "snapshots" / "station_0007.txt"), slurp(a2 / "snapshots" / "station_0007.txt"));
}

TEST(Run, ErrorClassesMapToExitCodes) {
  std::ostringstream log, err;
  RunConfig e = small_config(Mode::extract, scratch("noinput"));
  EXPECT_EQ(run(e, log, err, true), 2);
  e.input = (scratch("missing") / "nothing").string();
  EXPECT_EQ(run(e, log, err, true), 5);
  EXPECT_NE(err.str().find("error class=io"), std::string::npos);
}

TEST(Run, VerifyReportListsEveryCheck) {
  const fs::path out = scratch("verify");
  RunConfig c;
  c.mode = Mode::verify_kernels;
  c.verify_points = 5;
  c.out = out.string();
  std::ostringstream log, err;
  ASSERT_EQ(run(c, log, err, true), 0) << err.str();
  std::ifstream f(out / "verify.tsv");
  std::string line;
  int rows = 0, marked = 0;
  std::getline(f, line);
  std::getline(f, line);
  EXPECT_EQ(line, "lemma\tquantity\tenvelope\tC\ttrend_end\ttrend_start\tmargin\tpass");
  while (std::getline(f, line)) {
    ++rows;
    if (line.ends_with("\tPASS") || line.ends_with("\tFAIL")) ++marked;
  }
  VerifyOptions o;
  o.x = {0.01, 0.1, 1, 10, 100};
  EXPECT_EQ(rows, static_cast<int>(run_verification(o).size()));
  EXPECT_EQ(marked, rows);
}
