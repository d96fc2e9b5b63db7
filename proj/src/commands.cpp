#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "pvm/cli.hpp"

namespace pvm::cli {

using nlohmann::json;

namespace {

json header(std::string_view command, std::string_view input) {
  return json{{"tool", kToolVersion},
              {"command", command},
              {"input_sha256", sha256_hex(input)}};
}

Outcome parse_failure(json report, const SpecError& e) {
  report["error"] = {{"kind", "parse"}, {"message", e.what()}};
  return Outcome{kParseError, std::move(report), std::string("parse error: ") + e.what(), {}};
}

json complex_json(std::complex<double> z) { return json::array({z.real(), z.imag()}); }

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_json(const Vector& v) {
  json out = json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json one_based(std::span<const int> idx) {
  json out = json::array();
  for (int i : idx) out.push_back(i + 1);
  return out;
}

json classification_json(const Classification& c) {
  struct {
    json operator()(const Einstein& e) const {
      return json{{"kind", "Einstein"}, {"lambda", e.lambda}};
    }
    json operator()(const PseudoEinstein& p) const {
      return json{{"kind", "PseudoEinstein"},
                  {"lambda", complex_json(p.lambda)},
                  {"complex_pair", p.complex_pair}};
    }
    json operator()(const Neither& n) const {
      return json{{"kind", "Neither"},
                  {"first", complex_json(n.first)},
                  {"second", complex_json(n.second)}};
    }
  } visitor;
  json out = std::visit(visitor, c);
  out["description"] = describe(c);
  return out;
}

json pv_json(const PVReport& r) {
  json out{{"verdict", r.verdict},
           {"scaled_commutator_norm", r.max_commutator_norm},
           {"raw_commutator_norm", r.raw_max_norm},
           {"tolerance", r.tolerance}};
  if (r.criterion == 3) {
    out["criterion"] = "basis pairs: [rho, J(e_i, e_j)] = 0";
    if (r.witness_pair) out["witness_pair"] = one_based(*r.witness_pair);
  } else {
    out["criterion"] = "sampled planes: [J(pi), J(pi_perp)] = 0";
    if (r.signature) out["plane_signature"] = json::array({r.signature->r, r.signature->s});
    out["samples"] = r.samples;
    if (r.zero_samples) out["note"] = "no samples drawn; verdict is vacuous";
    if (r.witness_plane) out["witness_plane"] = matrix_json(*r.witness_plane);
  }
  return out;
}

json blocks_json(const BlockDecomposition& d) {
  json blocks = json::array();
  for (const auto& b : d.blocks) {
    blocks.push_back(json{{"dimension", b.subspace.dim()},
                          {"eigenvalue", complex_json(b.eigenvalue)},
                          {"complex_pair", b.complex_pair},
                          {"signature", json::array({b.subspace.signature().r,
                                                     b.subspace.signature().s})},
                          {"classification", classification_json(b.classification)},
                          {"basis", matrix_json(b.subspace.basis())}});
  }
  return blocks;
}

json witness_json(const BlockDecomposition& d) {
  const CrossTermWitness& w = *d.witness;
  json clusters = json::array();
  for (int b : w.blocks) clusters.push_back(complex_json(d.blocks[b].eigenvalue));
  return json{{"indices", one_based(w.indices)},
              {"value", w.value},
              {"block_of_index", one_based(w.blocks)},
              {"eigenvalue_of_index", clusters},
              {"basis", matrix_json(d.combined_basis())}};
}

// ---------------------------------------------------------------------------

class Battery {
 public:
  void add(const std::string& name, bool pass, json measured, json tolerance,
           const std::string& note = {}) {
    json item{{"name", name},
              {"status", pass ? "pass" : "fail"},
              {"measured", std::move(measured)},
              {"tolerance", std::move(tolerance)}};
    if (!note.empty()) item["note"] = note;
    failed_ = failed_ || !pass;
    items_.push_back(std::move(item));
  }
  void skip(const std::string& name, const std::string& reason) {
    items_.push_back(json{{"name", name}, {"status", "skipped"}, {"note", reason}});
  }
  void info(const std::string& name, json measured, const std::string& note = {}) {
    json item{{"name", name}, {"status", "info"}, {"measured", std::move(measured)}};
    if (!note.empty()) item["note"] = note;
    items_.push_back(std::move(item));
  }
  bool failed() const { return failed_; }
  json items() const { return items_; }

 private:
  json items_ = json::array();
  bool failed_ = false;
};

// Carries an already prefixed message.
class PointError : public Error {
 public:
  PointError(ErrorCode code, std::string msg) : Error(code, ""), msg_(std::move(msg)) {}
  const char* what() const noexcept override { return msg_.c_str(); }

 private:
  std::string msg_;
};

// Per-point quantities shared by the batteries.
struct PointData {
  Vector x;
  Model0 model;
  double tau;
  PVReport pv;
  Classification cls;
  double cluster_separation;  // largest gap between Ricci eigenvalue clusters
  int clusters;
};

std::string point_text(const Vector& x) {
  std::string s = "(";
  for (int i = 0; i < x.size(); ++i) s += (i ? ", " : "") + format_number(x(i));
  return s + ")";
}

PointData evaluate_point(const MetricChart& chart, const Vector& x, double pv_tol) {
  std::optional<Model0> curv;
  try {
    curv = riemann_model_at(chart, x);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DomainError && e.code() != ErrorCode::Degenerate) throw;
    throw PointError(e.code(), std::string(e.what()) + " at " + point_text(x));
  }
  Model0 m = std::move(*curv);
  const double tau = scalar_curvature_of_model(m);
  PVReport pv = is_puffini_videv(m, pv_tol);
  Classification cls = classify_block(m);
  const auto eig = real_generalized_eigenspaces(ricci(m), PvTolerances{}.cluster_tol);
  double sep = 0.0;
  for (std::size_t a = 0; a < eig.size(); ++a)
    for (std::size_t b = a + 1; b < eig.size(); ++b)
      sep = std::max(sep, std::abs(eig[a].value - eig[b].value));
  return PointData{x, std::move(m), tau, std::move(pv), cls, sep, static_cast<int>(eig.size())};
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Finite sampling box inside an open interval.
std::pair<double, double> sampling_range(const Interval& iv) {
  const bool lo_f = std::isfinite(iv.lo);
  const bool hi_f = std::isfinite(iv.hi);
  if (lo_f && hi_f) return {iv.lo, iv.hi};
  if (lo_f) return {iv.lo, iv.lo + 2.0};
  if (hi_f) return {iv.hi - 2.0, iv.hi};
  return {-1.0, 1.0};
}

Vector sample_in_box(const MetricChart& chart, std::mt19937_64& rng) {
  Vector x(chart.dim());
  for (int i = 0; i < chart.dim(); ++i) {
    const auto [lo, hi] = sampling_range(chart.domain()[i]);
    double v = uniform(rng, lo, hi);
    // uniform_real_distribution may return lo itself; the domain is open.
    while (!chart.domain()[i].contains(v)) v = uniform(rng, lo, hi);
    x(i) = v;
  }
  return x;
}

json point_json(const Vector& x) { return vector_json(x); }

double max_pv(const std::vector<PointData>& pts, const PointData** worst) {
  double best = -1.0;
  for (const auto& p : pts) {
    if (p.pv.max_commutator_norm > best) {
      best = p.pv.max_commutator_norm;
      *worst = &p;
    }
  }
  return best;
}

void pv_item(Battery& bat, const std::vector<PointData>& pts, double tol) {
  const PointData* worst = nullptr;
  const double v = max_pv(pts, &worst);
  json measured{{"max_scaled_commutator_norm", v}, {"points", pts.size()}};
  if (worst) {
    measured["worst_point"] = point_json(worst->x);
    if (worst->pv.witness_pair) measured["witness_pair"] = one_based(*worst->pv.witness_pair);
  }
  bat.add("puffini_videv_at_points", v < tol, measured, tol);
}

void not_einstein_item(Battery& bat, const std::vector<PointData>& pts) {
  constexpr double kSeparation = 1e-3;
  double weakest = std::numeric_limits<double>::infinity();
  const PointData* worst = nullptr;
  bool all_non_einstein = true;
  for (const auto& p : pts) {
    const bool einstein = std::holds_alternative<Einstein>(p.cls);
    all_non_einstein = all_non_einstein && !einstein && p.clusters >= 2;
    if (p.cluster_separation < weakest) {
      weakest = p.cluster_separation;
      worst = &p;
    }
  }
  json measured{{"min_cluster_separation", weakest}};
  if (worst) {
    measured["worst_point"] = point_json(worst->x);
    measured["classification_at_worst"] = classification_json(worst->cls);
  }
  bat.add("not_einstein", all_non_einstein && weakest > kSeparation, measured, kSeparation,
          "Ricci operator has at least two eigenvalue clusters at every sampled point");
}

void range_item(Battery& bat, const std::vector<PointData>& pts, const Matrix& expected,
                const std::string& label) {
  constexpr double kTol = 1e-6;
  double worst = 0.0;
  bool any_zero = false;
  for (const auto& p : pts) {
    const auto r = curvature_range(p.model);
    if (!r) {
      any_zero = true;
      continue;
    }
    worst = std::max(worst, projector_distance(*r, expected));
  }
  bat.add("curvature_range", !any_zero && worst < kTol,
          json{{"max_projector_distance", worst}, {"zero_curvature_points", any_zero}}, kTol,
          "range of the curvature operator equals " + label);
}

void energy_item(Battery& bat, const MetricChart& chart, const Vector& x0, const Vector& dir,
                 double step) {
  constexpr double kTol = 1e-6;
  const Matrix g = chart.metric(x0);
  const Vector v0 = dir / std::sqrt(dir.dot(g * dir));
  GeodesicOptions o;
  o.record_curvature = false;
  const GeodesicTrace tr = geodesic(chart, x0, v0, 1.0, step, o);
  const double elapsed = tr.times.back();
  const double drift = energy_drift(chart, tr);
  const double rate = elapsed > 0 ? drift / std::max(elapsed, 1.0) : 0.0;
  json measured{{"drift", drift}, {"elapsed", elapsed}, {"start", point_json(x0)},
                {"velocity", vector_json(v0)}};
  if (tr.truncated) measured["truncated"] = tr.stop_reason;
  bat.add("geodesic_energy_drift", rate < kTol, measured, kTol,
          "drift of <x',x'> per unit time along a generic unit-speed geodesic");
}

Matrix coordinate_span(int n, std::initializer_list<int> cols) {
  Matrix m = Matrix::Zero(n, static_cast<int>(cols.size()));
  int c = 0;
  for (int i : cols) m(i, c++) = 1.0;
  return m;
}

struct BlowupRun {
  GeodesicTrace trace;
  json measured;
  std::optional<BlowupFit> fit;
};

BlowupRun run_blowup(const MetricChart& chart, const GeodesicSpec& g, double step) {
  BlowupRun run;
  run.trace = geodesic(chart, g.start, g.velocity, g.length, step);
  run.measured = json{{"start", point_json(g.start)},
                      {"velocity", vector_json(g.velocity)},
                      {"length", g.length},
                      {"steps", run.trace.size() - 1},
                      {"energy_drift", energy_drift(chart, run.trace)}};
  if (run.trace.truncated) run.measured["truncated"] = run.trace.stop_reason;
  try {
    run.fit = blowup_exponent(run.trace, g.coordinate);
    run.measured["exponent"] = run.fit->exponent;
    run.measured["fit_residual"] = run.fit->residual;
    run.measured["fit_samples"] = run.fit->samples;
    run.measured["blowup"] = run.fit->blowup;
  } catch (const Error& e) {
    run.measured["fit_error"] = std::string(e.what());
  }
  return run;
}

double max_drift_off(const GeodesicTrace& tr, int keep) {
  double d = 0.0;
  for (const auto& x : tr.points)
    for (int i = 0; i < x.size(); ++i)
      if (i != keep) d = std::max(d, std::abs(x(i) - tr.points.front()(i)));
  return d;
}

void blowup_item(Battery& bat, const BlowupRun& run, double expected, const std::string& note) {
  constexpr double kBand = 0.05;
  json measured = run.measured;
  measured["expected_exponent"] = expected;
  const bool pass = run.fit && std::abs(run.fit->exponent - expected) <= kBand;
  bat.add("blowup_exponent", pass, measured, kBand, note);
}

// ---------------------------------------------------------------------------

void cone_battery(const ChartSpec& spec, const Options& opts, Battery& bat, json& report,
                  std::string& trace_out) {
  const MetricChart& chart = spec.chart;
  const MetricChart surface = conformal_surface_chart(*spec.alpha);
  const int n_points = opts.points.value_or(spec.points.value_or(20));
  const double step = opts.step.value_or(spec.step.value_or(1e-3));
  const double pv_tol = opts.tol.value_or(1e-7);
  std::mt19937_64 rng(opts.seed.value_or(spec.seed.value_or(1)));

  const double t_lo = std::max(0.1, 2.0 * spec.t_min);
  std::vector<PointData> pts;
  std::vector<double> tau_n;
  double max_r = 0.0;
  for (int s = 0; s < n_points; ++s) {
    Vector x(3);
    x << uniform(rng, t_lo, t_lo + 1.9), uniform(rng, -1, 1), uniform(rng, -1, 1);
    pts.push_back(evaluate_point(chart, x, pv_tol));
    tau_n.push_back(scalar_curvature_at(surface, x.tail(2)));
    max_r = std::max(max_r, pts.back().model.tensor().max_abs());
  }
  const bool flat = max_r < 1e-6;
  report["degenerate_family"] = flat;
  bat.info("max_curvature_component", json{{"max_abs", max_r}, {"flat_threshold", 1e-6}},
           flat ? "flat cone: the fiber has scalar curvature 2 (unit sphere), the excluded "
                  "boundary case; PV holds trivially"
                : "");
  pv_item(bat, pts, pv_tol);

  // tau_M = s t^-2 (tau_N - 2) with one sign s for all points.
  {
    int sign = 1;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (std::abs(tau_n[i] - 2.0) > 1e-6) {
        sign = (pts[i].tau * (tau_n[i] - 2.0) >= 0) ? 1 : -1;
        break;
      }
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double t = pts[i].x(0);
      worst = std::max(worst, std::abs(pts[i].tau - sign * (tau_n[i] - 2.0) / (t * t)) * t * t);
    }
    bat.add("scalar_curvature_relation", worst < 1e-6, json{{"sign", sign}, {"max_scaled_error", worst}},
            1e-6, "tau_M = s t^-2 (tau_fiber - 2), error measured in units of t^-2");
  }

  // t^2 tau_M is independent of t along a ray.
  {
    const Vector p0 = pts.front().x.tail(2);
    json values = json::array();
    std::vector<double> vals;
    for (double t : {0.1, 0.5, 1.0, 2.0}) {
      if (!(t > spec.t_min)) continue;
      Vector x(3);
      x << t, p0(0), p0(1);
      vals.push_back(t * t * scalar_curvature_at(chart, x));
      values.push_back(json{{"t", t}, {"t2_tau", vals.back()}});
    }
    const auto [lo, hi] = std::minmax_element(vals.begin(), vals.end());
    const double scale = std::max(std::abs(*lo), std::abs(*hi));
    const double spread = vals.empty() ? 0.0 : (*hi - *lo);
    const bool pass = scale < 1e-12 ? true : spread / scale < 1e-5;
    bat.add("t2_tau_constant_along_ray", pass,
            json{{"fiber_point", vector_json(p0)}, {"values", values},
                 {"relative_spread", scale < 1e-12 ? 0.0 : spread / scale}},
            1e-5);
  }

  if (flat) {
    const std::string why = "flat cone (fiber scalar curvature 2)";
    bat.skip("not_einstein", why);
    bat.skip("curvature_range", why);
    bat.skip("decomposition", why);
    bat.skip("blowup_exponent", why);
  } else {
    not_einstein_item(bat, pts);
    range_item(bat, pts, coordinate_span(3, {1, 2}), "span{d_x1, d_x2}");

    // Two blocks at every point, one of them curvature-free (the d_t line).
    {
      bool ok = true;
      json fails = json::array();
      for (const auto& p : pts) {
        bool good = false;
        try {
          const BlockDecomposition d = decompose_pv(p.model);
          int flat_blocks = 0;
          for (const auto& b : d.blocks) {
            const Model0 r = restrict_model(p.model, b.subspace.basis());
            if (r.tensor().max_abs() < 1e-8 * (1.0 + p.model.tensor().max_abs())) ++flat_blocks;
          }
          good = d.blocks.size() == 2 && flat_blocks == 1;
        } catch (const Error&) {
          good = false;
        }
        if (!good) {
          ok = false;
          fails.push_back(point_json(p.x));
        }
      }
      bat.add("decomposition", ok, json{{"failing_points", fails}}, json(nullptr),
              "two blocks, one with zero curvature");
    }

    GeodesicSpec g;
    if (spec.geodesic) {
      g = *spec.geodesic;
    } else {
      g.start = Vector(3);
      g.start << 1.0, pts.front().x(1), pts.front().x(2);
      g.velocity = Vector::Zero(3);
      g.velocity(0) = -1.0;
      g.length = 1.0 - std::max(0.01, 2.0 * spec.t_min);
      g.coordinate = 0;
    }
    BlowupRun run = run_blowup(chart, g, step);
    run.measured["off_axis_drift"] = max_drift_off(run.trace, g.coordinate);
    blowup_item(bat, run, -2.0, "ln|tau| against ln t along t -> (t, P0)");
    if (opts.want_trace) trace_out = format_trace(run.trace);
  }

  Vector dir(3);
  dir << 0.3, 0.5, -0.4;
  energy_item(bat, chart, pts.front().x, dir, step);
}

void beta_battery(const ChartSpec& spec, const Options& opts, Battery& bat, json& report,
                  std::string& trace_out) {
  const MetricChart& chart = spec.chart;
  const double beta = spec.beta;
  const int n_points = opts.points.value_or(spec.points.value_or(20));
  const double step = opts.step.value_or(spec.step.value_or(1e-3));
  const double pv_tol = opts.tol.value_or(1e-7);
  std::mt19937_64 rng(opts.seed.value_or(spec.seed.value_or(1)));
  const Expr tau_closed = beta_family_scalar_curvature(beta);
  report["closed_form_scalar_curvature"] = tau_closed.to_string();

  {
    Vector x(4);
    x << 1, 1, 0, 0;
    const double tau = scalar_curvature_at(chart, x);
    const double expected = 1.0 / (1.0 + beta);
    bat.add("scalar_curvature_at_reference", std::abs(std::abs(tau) - expected) < 1e-6,
            json{{"point", point_json(x)}, {"tau", tau}, {"expected_abs_tau", expected}}, 1e-6,
            "|tau(1,1,0,0)| against 1/(x1 (x1 + beta x2))");
  }

  std::vector<PointData> pts;
  for (int s = 0; s < n_points; ++s) {
    Vector x(4);
    x << uniform(rng, 0.2, 3.0), uniform(rng, 0.2, 3.0), uniform(rng, -1, 1), uniform(rng, -1, 1);
    pts.push_back(evaluate_point(chart, x, pv_tol));
  }

  {
    double worst = 0.0;
    const PointData* wp = nullptr;
    for (const auto& p : pts) {
      const double closed = eval(tau_closed, p.x);
      const double rel = std::abs(std::abs(p.tau) - std::abs(closed)) / std::abs(closed);
      if (rel >= worst) {
        worst = rel;
        wp = &p;
      }
    }
    bat.add("scalar_curvature_closed_form", worst < 1e-6,
            json{{"max_relative_error", worst}, {"worst_point", point_json(wp->x)},
                 {"tau", wp->tau}, {"closed_form", eval(tau_closed, wp->x)}},
            1e-6, "|tau| against 1/(x1 (x1 + beta x2)) at the sampled points");
  }

  // Only R_3443 and its symmetry images may be nonzero.
  {
    double worst = 0.0;
    std::array<int, 4> witness{0, 0, 0, 0};
    const PointData* wp = nullptr;
    for (const auto& p : pts) {
      const Tensor4& r = p.model.tensor().raw();
      const double scale = r.max_abs();
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
          for (int k = 0; k < 4; ++k)
            for (int l = 0; l < 4; ++l) {
              const bool allowed = i >= 2 && j >= 2 && k >= 2 && l >= 2;
              if (allowed) continue;
              const double rel = scale > 0 ? std::abs(r(i, j, k, l)) / scale : 0.0;
              if (rel > worst) {
                worst = rel;
                witness = {i, j, k, l};
                wp = &p;
              }
            }
    }
    json measured{{"max_relative_other_component", worst}};
    if (wp) {
      measured["witness_indices"] = one_based(witness);
      measured["witness_point"] = point_json(wp->x);
      measured["witness_value"] =
          wp->model.tensor()(witness[0], witness[1], witness[2], witness[3]);
    }
    bat.add("only_R3443", worst < 1e-8, measured, 1e-8,
            "components touching x1 or x2, relative to max |R|");
  }

  pv_item(bat, pts, pv_tol);
  not_einstein_item(bat, pts);
  range_item(bat, pts, coordinate_span(4, {2, 3}), "span{d_x3, d_x4}");

  {
    std::vector<double> ks;
    for (const auto& p : pts) ks.push_back(beta_invariant(beta, p.x));
    const auto [lo, hi] = std::minmax_element(ks.begin(), ks.end());
    const double spread = (*hi - *lo) / std::max(std::abs(*hi), std::abs(*lo));
    bat.add("beta_invariant_constant", spread < 1e-6,
            json{{"K", ks.front()}, {"relative_spread", spread}, {"beta_squared", beta * beta}},
            1e-6, "det(Hess Psi on span{d_x1, d_x2}) / tau^2 with Psi = -ln tau");
  }

  GeodesicSpec g;
  if (spec.geodesic) {
    g = *spec.geodesic;
  } else {
    g.start = Vector(4);
    g.start << 0.1, 1.0, 0.0, 0.0;
    g.velocity = Vector::Zero(4);
    g.velocity(0) = -1.0;
    g.length = 0.1 - 1e-3;
    g.coordinate = 0;
  }
  BlowupRun run = run_blowup(chart, g, step);
  run.measured["off_axis_drift"] = max_drift_off(run.trace, g.coordinate);
  blowup_item(bat, run, -1.0, "ln|tau| against ln x1 along x1 -> 0 at fixed x2");
  if (opts.want_trace) trace_out = format_trace(run.trace);

  Vector dir(4);
  dir << 0.3, -0.2, 0.5, 0.4;
  energy_item(bat, chart, pts.front().x, dir, step);
}

void custom_battery(const ChartSpec& spec, const Options& opts, Battery& bat, json& report,
                    std::string& trace_out) {
  const MetricChart& chart = spec.chart;
  const int n = chart.dim();
  const int n_points = opts.points.value_or(spec.points.value_or(20));
  const double step = opts.step.value_or(spec.step.value_or(1e-3));
  const double pv_tol = opts.tol.value_or(1e-7);
  std::mt19937_64 rng(opts.seed.value_or(spec.seed.value_or(1)));

  std::vector<PointData> pts;
  bool definite = true;
  std::optional<Vector> indefinite_at;
  for (int s = 0; s < n_points; ++s) {
    const Vector x = sample_in_box(chart, rng);
    pts.push_back(evaluate_point(chart, x, pv_tol));
    if (!(pts.back().model.space().signature() == Signature{0, n}) && definite) {
      definite = false;
      indefinite_at = x;
    }
  }
  json measured{{"points", pts.size()}};
  if (indefinite_at) measured["indefinite_at"] = point_json(*indefinite_at);
  bat.add("metric_positive_definite", definite, measured, json(nullptr));
  pv_item(bat, pts, pv_tol);

  int einstein = 0, pseudo = 0, neither = 0;
  for (const auto& p : pts) {
    if (std::holds_alternative<Einstein>(p.cls)) ++einstein;
    else if (std::holds_alternative<PseudoEinstein>(p.cls)) ++pseudo;
    else ++neither;
  }
  bat.info("ricci_classification",
           json{{"Einstein", einstein}, {"PseudoEinstein", pseudo}, {"Neither", neither}});

  if (spec.geodesic) {
    BlowupRun run = run_blowup(chart, *spec.geodesic, step);
    bat.info("geodesic", run.measured);
    if (opts.want_trace) trace_out = format_trace(run.trace);
  }
  report["dimension"] = n;
}

}  // namespace

// ---------------------------------------------------------------------------

Outcome run_check(std::string_view input, const Options& opts) {
  json report = header("check", input);
  std::optional<ModelSpec> spec;
  try {
    spec = parse_model_spec(input);
  } catch (const SpecError& e) {
    return parse_failure(std::move(report), e);
  }
  const Model0& m = spec->model;
  const double tol = opts.tol.value_or(spec->tolerances.tol);
  const double sampled_tol = opts.sampled_tol.value_or(spec->sampled_tol);
  const int samples = opts.samples.value_or(50);
  const std::uint64_t seed = opts.seed.value_or(1);
  report["model"] = json{{"dimension", m.dim()},
                         {"signature", json::array({m.space().signature().p,
                                                    m.space().signature().q})}};
  report["seed"] = seed;

  const PVReport det = is_puffini_videv(m, tol);
  report["deterministic"] = pv_json(det);

  json sampled = json::array();
  bool all_true = true;
  bool all_false = true;
  std::string failure;
  for (const GrassmannSignature& sig : admissible_signatures(m.space())) {
    try {
      const PVReport r = check_commuting_on_grassmannian(m, sig, samples, seed, sampled_tol);
      all_true = all_true && r.verdict;
      all_false = all_false && !r.verdict;
      sampled.push_back(pv_json(r));
    } catch (const Error& e) {
      failure = std::string(e.what());
      sampled.push_back(json{{"plane_signature", json::array({sig.r, sig.s})},
                             {"error", failure}});
      all_true = all_false = false;
    }
  }
  report["sampled"] = sampled;

  Outcome out;
  if (det.verdict && all_true) {
    out.exit_code = kPass;
    report["verdict"] = "puffini-videv";
  } else if (!det.verdict && all_false) {
    out.exit_code = kPropertyFails;
    report["verdict"] = "not puffini-videv";
  } else {
    out.exit_code = kDisagreement;
    report["verdict"] = "disagreement";
    out.diagnostic = failure.empty()
                         ? "deterministic and sampled criteria disagree (numerical pathology)"
                         : failure;
  }
  report["agreement"] = out.exit_code != kDisagreement;
  out.report = std::move(report);
  return out;
}

Outcome run_decompose(std::string_view input, const Options& opts) {
  json report = header("decompose", input);
  std::optional<ModelSpec> spec;
  try {
    spec = parse_model_spec(input);
  } catch (const SpecError& e) {
    return parse_failure(std::move(report), e);
  }
  PvTolerances tol = spec->tolerances;
  if (opts.tol) tol.tol = *opts.tol;
  report["tolerances"] = json{{"cross_term", tol.tol}, {"cluster", tol.cluster_tol}};

  Outcome out;
  try {
    const BlockDecomposition d = decompose_pv(spec->model, tol);
    const VanishingReport v = cross_block_vanishing_check(spec->model, d, tol.tol);
    report["decomposable"] = true;
    report["blocks"] = blocks_json(d);
    report["cross_term_max"] = d.cross_term_max;
    report["threshold"] = d.threshold;
    report["cross_block_check"] = json{{"antisymmetry_max", v.antisym_max},
                                       {"vanishing_max", v.vanishing_max},
                                       {"threshold", v.threshold},
                                       {"passes", v.passes()}};
    out.exit_code = kPass;
  } catch (const NotDecomposableError& e) {
    report["decomposable"] = false;
    report["blocks"] = blocks_json(e.split());
    report["cross_term_max"] = e.split().cross_term_max;
    report["threshold"] = e.split().threshold;
    report["witness"] = witness_json(e.split());
    report["deterministic"] = pv_json(e.pv_report());
    out.exit_code = kPropertyFails;
    out.diagnostic = e.what();
  } catch (const Error& e) {
    report["error"] = {{"kind", to_string(e.code())}, {"message", e.what()}};
    out.exit_code = kDisagreement;
    out.diagnostic = std::string(e.what());
  }
  out.report = std::move(report);
  return out;
}

Outcome run_geometry(std::string_view input, const Options& opts) {
  json report = header("geometry", input);
  std::optional<ChartSpec> spec;
  try {
    spec = parse_chart_spec(input);
  } catch (const SpecError& e) {
    return parse_failure(std::move(report), e);
  }
  report["label"] = spec->chart.label();
  Outcome out;
  Battery bat;
  try {
    switch (spec->family) {
      case ChartFamily::Cone:
        report["family"] = "cone";
        cone_battery(*spec, opts, bat, report, out.trace_table);
        break;
      case ChartFamily::Beta:
        report["family"] = "beta";
        report["beta"] = spec->beta;
        beta_battery(*spec, opts, bat, report, out.trace_table);
        break;
      case ChartFamily::Custom:
        report["family"] = "custom";
        custom_battery(*spec, opts, bat, report, out.trace_table);
        break;
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DomainError && e.code() != ErrorCode::Degenerate) throw;
    report["items"] = bat.items();
    report["error"] = {{"kind", to_string(e.code())}, {"message", e.what()}};
    out.exit_code = kDomainError;
    out.diagnostic = std::string("evaluation failed inside the declared domain: ") + e.what();
    out.report = std::move(report);
    return out;
  }
  report["items"] = bat.items();
  report["passed"] = !bat.failed();
  out.exit_code = bat.failed() ? kPropertyFails : kPass;
  out.report = std::move(report);
  return out;
}

}  // namespace pvm::cli
