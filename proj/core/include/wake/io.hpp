#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "wake/asymptotics.hpp"
#include "wake/verify.hpp"

namespace wake {

enum class Mode { solve, boundary_fit, extract, verify_kernels, linear_check };
Mode mode_from_name(const std::string& name);
const char* mode_name(Mode m);

/// Params plus the run plumbing.  Text form: one `key = value` per line, `#` starts a comment.
struct RunConfig {
  Params prm;
  Mode mode = Mode::solve;
  BoundaryFamily family = BoundaryFamily::gaussian_wake;
  double amplitude = 0.01;
  std::uint64_t seed = 1;
  std::string out = "out";
  std::string input;   ///< extract: directory written by an earlier solve
  std::string traces;  ///< boundary-fit: external cross-section file (optional)
  int verify_points = 40;
  bool snapshots = true;  ///< write per-station snapshots
};

/// Throws a config error naming the line for malformed lines, unknown keys and bad values,
/// then runs the restriction checker (precondition error).
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);
/// Canonical text form; parse_config(format_config(c)) == c.
std::string format_config(const RunConfig& c);

// ---- file formats -------------------------------------------------------------

inline constexpr int schema_version = 1;

/// Shortest text that reads back to the same double.
std::string num(double v);

void write_snapshot(const std::string& path, int station, double x, const Slice& u, const Slice& v,
                    const Slice& w, const Grid& g);
/// y-space companion: columns n, y, u_re, u_im, v_re, v_im, w_re, w_im.
void write_snapshot_y(const std::string& path, int station, double x, const Slice& u, const Slice& v,
                      const Slice& w, const Grid& g);
/// Returns the station coordinate; throws io errors on schema or grid mismatch.
double read_snapshot(const std::string& path, const Grid& g, Slice& u, Slice& v, Slice& w);

void write_boundary(const std::string& path, const BoundaryData& b, const Grid& g);
BoundaryData read_boundary(const std::string& path, const Grid& g);

void write_norms_csv(const std::string& path, const FlowState& s, const Grid& g, const Params& prm);

/// Coefficients, the a4 dual report, decay slopes and the a1 diagnostic.
void write_coeffs(const std::string& path, const AsymptoticCoeffs& c, const DecayFit& d, const A1Diagnostic& a);
void write_verify(const std::string& path, const std::vector<BoundCheck>& checks);

// ---- external traces ----------------------------------------------------------

struct Traces {
  Slice u, v, w;
  double taper_defect = 0;   ///< largest change made by the endpoint taper, relative to max |f|
  double spectral_tail = 0;  ///< input content beyond the grid's Nyquist, relative to the peak
  bool on_grid = false;      ///< samples coincided with the grid: copied as is
};

/// Reads `n y u_re u_im v_re v_im w_re w_im` rows (the y-space companion format) and
/// interpolates every mode onto the grid.  Samples must be uniform, strictly increasing,
/// straddle y = 0 and span at least L/2.
Traces resample_trace(const std::string& path, const Grid& g);
Traces resample_trace(std::istream& in, const Grid& g);

// ---- orchestration --------------------------------------------------------------

/// Runs the configured pipeline into c.out.  Returns the exit status: 0 ok, otherwise the
/// code of the error class (2 config, 3 precondition, 4 convergence, 5 io), printed to err
/// as `error class=<name> <Kind>: <message>`.
int run(const RunConfig& c, std::ostream& log, std::ostream& err, bool quiet = false);

}  // namespace wake
