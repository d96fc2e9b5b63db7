#include <charconv>
#include <cmath>
#include <limits>

#include <openssl/evp.h>

#include "pvm/cli.hpp"

namespace pvm::cli {

using nlohmann::json;

namespace {

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw SpecError(std::string("malformed JSON: ") + e.what());
  }
}

const json& require(const json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw SpecError(std::string("missing field \"") + key + "\"");
  }
  return obj.at(key);
}

double as_number(const json& v, const std::string& what) {
  if (!v.is_number()) throw SpecError(what + " must be a number");
  return v.get<double>();
}

int as_int(const json& v, const std::string& what) {
  if (!v.is_number_integer()) throw SpecError(what + " must be an integer");
  return v.get<int>();
}

Vector as_vector(const json& v, int n, const std::string& what) {
  if (!v.is_array() || static_cast<int>(v.size()) != n) {
    throw SpecError(what + " must be a list of " + std::to_string(n) + " numbers");
  }
  Vector out(n);
  for (int i = 0; i < n; ++i) out(i) = as_number(v[i], what);
  return out;
}

// Accepts m rows of m entries or m*m entries row-major.
template <class Get>
void for_each_square(const json& v, int m, const std::string& what, Get&& get) {
  if (!v.is_array()) throw SpecError(what + " must be a list");
  if (static_cast<int>(v.size()) == m && m > 0 && v[0].is_array()) {
    for (int i = 0; i < m; ++i) {
      if (!v[i].is_array() || static_cast<int>(v[i].size()) != m) {
        throw SpecError(what + " row " + std::to_string(i + 1) + " must have " +
                        std::to_string(m) + " entries");
      }
      for (int j = 0; j < m; ++j) get(i, j, v[i][j]);
    }
    return;
  }
  if (static_cast<int>(v.size()) != m * m) {
    throw SpecError(what + " must have " + std::to_string(m) + " rows or " +
                    std::to_string(m * m) + " entries");
  }
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) get(i, j, v[i * m + j]);
}

double as_bound(const json& v, double if_null) {
  if (v.is_null()) return if_null;
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw SpecError("domain bound \"" + s + "\" is not a number");
  }
  return as_number(v, "domain bound");
}

Expr parse_expression(const json& v, int n_vars, const std::string& what) {
  if (!v.is_string()) throw SpecError(what + " must be an expression string");
  try {
    return parse(v.get<std::string>(), n_vars);
  } catch (const SyntaxError& e) {
    throw SpecError(what + ": " + e.what() + " at offset " + std::to_string(e.offset()));
  } catch (const Error& e) {
    throw SpecError(what + ": " + e.what());
  }
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string format_trace(const GeodesicTrace& trace) {
  std::string out = "# time";
  const int n = trace.size() == 0 ? 0 : static_cast<int>(trace.points.front().size());
  for (int i = 0; i < n; ++i) out += " x" + std::to_string(i + 1);
  out += " tau\n";
  for (std::size_t r = 0; r < trace.size(); ++r) {
    out += format_number(trace.times[r]);
    for (int i = 0; i < n; ++i) out += " " + format_number(trace.points[r](i));
    out += " ";
    out += r < trace.scalar_curvatures.size() ? format_number(trace.scalar_curvatures[r]) : "nan";
    out += "\n";
  }
  return out;
}

std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 0xf];
  }
  return out;
}

ModelSpec parse_model_spec(std::string_view text) {
  const json doc = parse_json(text);
  if (!doc.is_object()) throw SpecError("model spec must be a JSON object");
  const int m = as_int(require(doc, "dimension"), "dimension");
  if (m < 1) throw SpecError("dimension must be positive");

  const json& sig = require(doc, "signature");
  if (!sig.is_array() || sig.size() != 2) throw SpecError("signature must be [p, q]");
  const int p = as_int(sig[0], "signature p");
  const int q = as_int(sig[1], "signature q");
  if (p < 0 || q < 0) throw SpecError("signature entries must be non-negative");
  if (p + q != m) {
    throw SpecError("signature [" + std::to_string(p) + "," + std::to_string(q) +
                    "] does not match dimension " + std::to_string(m));
  }

  std::optional<Matrix> gram;
  if (doc.contains("gram") && !doc.at("gram").is_null()) {
    Matrix g(m, m);
    for_each_square(doc.at("gram"), m, "gram",
                    [&](int i, int j, const json& v) { g(i, j) = as_number(v, "gram entry"); });
    gram = g;
  }

  std::vector<CurvatureEntry> entries;
  if (doc.contains("curvature")) {
    const json& list = doc.at("curvature");
    if (!list.is_array()) throw SpecError("curvature must be a list of entries");
    for (std::size_t n = 0; n < list.size(); ++n) {
      const std::string what = "curvature entry " + std::to_string(n + 1);
      const json& idx = require(list[n], "indices");
      if (!idx.is_array() || idx.size() != 4) throw SpecError(what + " needs four indices");
      int ix[4];
      for (int a = 0; a < 4; ++a) {
        ix[a] = as_int(idx[a], what + " index");
        if (ix[a] < 1 || ix[a] > m) {
          throw SpecError(what + " index " + std::to_string(ix[a]) + " outside 1.." +
                          std::to_string(m));
        }
      }
      entries.push_back({ix[0] - 1, ix[1] - 1, ix[2] - 1, ix[3] - 1,
                         as_number(require(list[n], "value"), what + " value")});
    }
  }

  PvTolerances tol;
  double sampled = 1e-6;
  if (doc.contains("tolerances")) {
    const json& t = doc.at("tolerances");
    if (!t.is_object()) throw SpecError("tolerances must be an object");
    if (t.contains("pv")) tol.tol = as_number(t.at("pv"), "tolerances.pv");
    if (t.contains("cluster")) tol.cluster_tol = as_number(t.at("cluster"), "tolerances.cluster");
    if (t.contains("sampled")) sampled = as_number(t.at("sampled"), "tolerances.sampled");
  }

  try {
    InnerProductSpace space = make_space(p, q, gram);
    AlgCurvTensor a = tensor_from_components(m, entries);
    return ModelSpec{Model0(std::move(space), std::move(a)), tol, sampled};
  } catch (const Error& e) {
    throw SpecError(std::string(e.what()));
  }
}

ChartSpec parse_chart_spec(std::string_view text) {
  const json doc = parse_json(text);
  if (!doc.is_object()) throw SpecError("chart spec must be a JSON object");
  const json& fam = require(doc, "family");
  if (!fam.is_string()) throw SpecError("family must be a string");
  const std::string family = fam.get<std::string>();
  const json params = doc.value("parameters", json::object());
  if (!params.is_object()) throw SpecError("parameters must be an object");

  std::optional<MetricChart> chart;
  ChartFamily kind;
  std::optional<Expr> alpha;
  double t_min = 1e-3;
  double beta = 0.0;
  try {
    if (family == "thm14" || family == "cone") {
      kind = ChartFamily::Cone;
      alpha = parse_expression(require(params, "alpha"), 2, "alpha");
      if (params.contains("t_min")) t_min = as_number(params.at("t_min"), "t_min");
      chart = cone_chart(*alpha, t_min);
    } else if (family == "thm15" || family == "beta") {
      kind = ChartFamily::Beta;
      beta = as_number(require(params, "beta"), "beta");
      chart = beta_family_chart(beta);
    } else if (family == "custom") {
      kind = ChartFamily::Custom;
      const int n = as_int(require(doc, "dimension"), "dimension");
      if (n < 1) throw SpecError("dimension must be positive");
      std::vector<Expr> comps(static_cast<std::size_t>(n) * n, Expr::number(0.0));
      for_each_square(require(doc, "components"), n, "components",
                      [&](int i, int j, const json& v) {
                        comps[i * n + j] = parse_expression(
                            v, n, "g_" + std::to_string(i + 1) + std::to_string(j + 1));
                      });
      std::vector<Interval> domain(n);
      if (doc.contains("domain")) {
        const json& d = doc.at("domain");
        if (!d.is_array() || static_cast<int>(d.size()) != n) {
          throw SpecError("domain must list " + std::to_string(n) + " intervals");
        }
        for (int i = 0; i < n; ++i) {
          if (!d[i].is_array() || d[i].size() != 2) {
            throw SpecError("domain interval " + std::to_string(i + 1) + " must be [lo, hi]");
          }
          domain[i].lo = as_bound(d[i][0], -std::numeric_limits<double>::infinity());
          domain[i].hi = as_bound(d[i][1], std::numeric_limits<double>::infinity());
          if (!(domain[i].lo < domain[i].hi)) {
            throw SpecError("domain interval " + std::to_string(i + 1) + " is empty");
          }
        }
      }
      chart.emplace(n, std::move(comps), std::move(domain), doc.value("label", std::string()));
    } else {
      throw SpecError("unknown family \"" + family + "\" (expected cone, beta or custom)");
    }
  } catch (const Error& e) {
    throw SpecError(std::string(e.what()));
  }

  ChartSpec spec{.family = kind,
                 .chart = std::move(*chart),
                 .alpha = alpha,
                 .t_min = t_min,
                 .beta = beta,
                 .geodesic = std::nullopt,
                 .points = std::nullopt,
                 .seed = std::nullopt,
                 .step = std::nullopt};
  const int n = spec.chart.dim();
  if (doc.contains("geodesic")) {
    const json& g = doc.at("geodesic");
    GeodesicSpec gs;
    gs.start = as_vector(require(g, "start"), n, "geodesic.start");
    gs.velocity = as_vector(require(g, "velocity"), n, "geodesic.velocity");
    gs.length = as_number(require(g, "length"), "geodesic.length");
    if (!(gs.length > 0.0)) throw SpecError("geodesic.length must be positive");
    if (g.contains("coordinate")) {
      gs.coordinate = as_int(g.at("coordinate"), "geodesic.coordinate") - 1;
      if (gs.coordinate < 0 || gs.coordinate >= n) {
        throw SpecError("geodesic.coordinate outside 1.." + std::to_string(n));
      }
    }
    spec.geodesic = gs;
  }
  if (doc.contains("points")) {
    spec.points = as_int(doc.at("points"), "points");
    if (*spec.points < 1) throw SpecError("points must be positive");
  }
  if (doc.contains("seed")) {
    const json& s = doc.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0)) {
      throw SpecError("seed must be a non-negative integer");
    }
    spec.seed = s.get<std::uint64_t>();
  }
  if (doc.contains("step")) {
    spec.step = as_number(doc.at("step"), "step");
    if (!(*spec.step > 0.0)) throw SpecError("step must be positive");
  }
  return spec;
}

}  // namespace pvm::cli
