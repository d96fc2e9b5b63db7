#pragma once

// File-driven front end: model and chart spec files in JSON, the check /
// decompose / geometry commands, and their JSON reports.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "pvm/geometry.hpp"
#include "pvm/pv.hpp"

namespace pvm::cli {

inline constexpr std::string_view kToolVersion = "pvtool 0.1.0";

/// Exit codes shared by all commands.
enum Exit : int {
  kPass = 0,
  kPropertyFails = 1,
  kDisagreement = 2,
  kParseError = 64,
  kDomainError = 65,
};

/// Thrown for anything wrong with a spec file; maps to exit 64.
class SpecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ModelSpec {
  Model0 model;
  PvTolerances tolerances;
  double sampled_tol = 1e-6;
};

/// {"dimension": m, "signature": [p, q], "gram": [...]?, "curvature":
///  [{"indices": [i,j,k,l], "value": v}, ...], "tolerances": {...}?}
/// Indices are 1-based. "gram" is either m rows or m*m numbers, row-major.
/// "tolerances" may set "pv", "sampled" and "cluster".
ModelSpec parse_model_spec(std::string_view text);

enum class ChartFamily { Cone, Beta, Custom };

struct GeodesicSpec {
  Vector start;
  Vector velocity;
  double length = 1.0;
  int coordinate = 0;  // distance-to-singularity coordinate for the blowup fit
};

struct ChartSpec {
  ChartFamily family = ChartFamily::Custom;
  MetricChart chart;
  std::optional<Expr> alpha;    // cone
  double t_min = 1e-3;          // cone
  double beta = 0.0;            // beta family
  std::optional<GeodesicSpec> geodesic;
  std::optional<int> points;
  std::optional<std::uint64_t> seed;
  std::optional<double> step;
};

/// {"family": "cone"|"beta"|"custom", "parameters": {...},
///  "dimension": n, "components": [[...]...], "domain": [[lo, hi], ...],
///  "label": "...", "geodesic": {"start": [...], "velocity": [...],
///  "length": L, "coordinate": k}?, "points": N?, "seed": S?, "step": h?}
/// Domain bounds may be numbers, null, or the strings "-inf" / "inf".
ChartSpec parse_chart_spec(std::string_view text);

struct Options {
  std::optional<double> tol;
  std::optional<double> sampled_tol;
  std::optional<int> samples;
  std::optional<std::uint64_t> seed;
  std::optional<int> points;
  std::optional<double> step;
  bool want_trace = false;
};

struct Outcome {
  int exit_code = kPass;
  nlohmann::json report;
  std::string diagnostic;   // for stderr; empty on success
  std::string trace_table;  // geometry only, when requested
};

Outcome run_check(std::string_view input, const Options& opts);
Outcome run_decompose(std::string_view input, const Options& opts);
Outcome run_geometry(std::string_view input, const Options& opts);

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);

/// Whitespace-separated columns: time, coordinates, tau; one row per step.
std::string format_trace(const GeodesicTrace& trace);

/// Shortest round-trip decimal, independent of the C locale.
std::string format_number(double v);

}  // namespace pvm::cli
