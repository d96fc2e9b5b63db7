#include "pvm/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace pvm {

MetricChart::MetricChart(int dim, std::vector<Expr> components, std::vector<Interval> domain,
                         std::string label)
    : n_(dim), comps_(std::move(components)), domain_(std::move(domain)), label_(std::move(label)) {
  if (n_ < 1) throw Error(ErrorCode::BadParameter, "chart dimension " + std::to_string(n_));
  if (comps_.size() != static_cast<std::size_t>(n_ * n_)) {
    throw Error(ErrorCode::DimensionMismatch, "expected " + std::to_string(n_ * n_) +
                                                  " metric components, got " +
                                                  std::to_string(comps_.size()));
  }
  if (domain_.empty()) domain_.assign(n_, Interval{});
  if (domain_.size() != static_cast<std::size_t>(n_)) {
    throw Error(ErrorCode::DimensionMismatch, "domain box has wrong dimension");
  }
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) {
      if (component(i, j).max_variable() >= n_) {
        throw Error(ErrorCode::VariableOutOfRange,
                    "g_" + std::to_string(i + 1) + std::to_string(j + 1) + " = " +
                        component(i, j).to_string());
      }
      if (!(component(i, j) == component(j, i))) {
        throw Error(ErrorCode::BadParameter, "metric components are not symmetric");
      }
    }
  }
}

bool MetricChart::in_domain(const Vector& x) const {
  if (x.size() != n_) return false;
  for (int i = 0; i < n_; ++i) {
    if (!domain_[i].contains(x(i))) return false;
  }
  return true;
}

void MetricChart::require_domain(const Vector& x) const {
  if (x.size() != n_) {
    throw Error(ErrorCode::DimensionMismatch, "point of dimension " + std::to_string(x.size()));
  }
  if (!in_domain(x)) throw Error(ErrorCode::DomainError, "point outside the chart domain");
}

Matrix MetricChart::metric(const Vector& x) const {
  require_domain(x);
  Matrix g(n_, n_);
  for (int i = 0; i < n_; ++i) {
    for (int j = i; j < n_; ++j) g(i, j) = g(j, i) = eval(component(i, j), x);
  }
  return g;
}

MetricJet MetricChart::metric_jet(const Vector& x) const {
  require_domain(x);
  MetricJet j;
  j.g = Matrix(n_, n_);
  j.dg.assign(n_, Matrix(n_, n_));
  j.d2g.assign(n_, std::vector<Matrix>(n_, Matrix(n_, n_)));
  for (int a = 0; a < n_; ++a) {
    for (int b = a; b < n_; ++b) {
      const Jet2 c = eval_jet2(component(a, b), x);
      j.g(a, b) = j.g(b, a) = c.value;
      for (int k = 0; k < n_; ++k) {
        j.dg[k](a, b) = j.dg[k](b, a) = c.grad(k);
        for (int l = 0; l < n_; ++l) j.d2g[k][l](a, b) = j.d2g[k][l](b, a) = c.hess(k, l);
      }
    }
  }
  return j;
}

// ---------------------------------------------------------------------------

MetricChart cone_chart(const Expr& alpha, double t_min) {
  if (!(t_min > 0.0)) throw Error(ErrorCode::BadParameter, "t_min must be positive");
  if (alpha.max_variable() > 1) {
    throw Error(ErrorCode::VariableOutOfRange, "alpha may only use x1, x2");
  }
  // Surface coordinates x1, x2 become chart coordinates 2 and 3.
  const int shift[] = {1, 2};
  const Expr a = remap_variables(alpha, shift);
  const Expr t = Expr::variable(0);
  const Expr warp =
      Expr::pow(t, 2.0) * Expr::call(Func::Exp, Expr::number(2.0) * a);
  const Expr zero = Expr::number(0.0);
  std::vector<Expr> comps{Expr::number(1.0), zero, zero, zero, warp, zero, zero, zero, warp};
  const double inf = std::numeric_limits<double>::infinity();
  return MetricChart(3, std::move(comps), {{t_min, inf}, {-inf, inf}, {-inf, inf}},
                     "cone over e^{2 alpha}(dx1^2+dx2^2), alpha = " + alpha.to_string());
}

MetricChart conformal_surface_chart(const Expr& alpha) {
  if (alpha.max_variable() > 1) {
    throw Error(ErrorCode::VariableOutOfRange, "alpha may only use x1, x2");
  }
  const Expr f = Expr::call(Func::Exp, Expr::number(2.0) * alpha);
  const Expr zero = Expr::number(0.0);
  return MetricChart(2, {f, zero, zero, f}, {},
                     "surface e^{2 alpha}(dx1^2+dx2^2), alpha = " + alpha.to_string());
}

MetricChart beta_family_chart(double beta) {
  if (!(beta > 0.0)) {
    throw Error(ErrorCode::BadParameter, "beta must be positive, got " + std::to_string(beta));
  }
  const Expr x1 = Expr::variable(0);
  const Expr x2 = Expr::variable(1);
  const Expr one = Expr::number(1.0);
  const Expr zero = Expr::number(0.0);
  const Expr g33 = Expr::pow(x1, 2.0);
  const Expr g44 = x1 * (x1 + Expr::number(beta) * x2);
  std::vector<Expr> comps{one,  zero, zero, zero, zero, one,  zero, zero,
                          zero, zero, g33,  zero, zero, zero, zero, g44};
  const double inf = std::numeric_limits<double>::infinity();
  return MetricChart(4, std::move(comps), {{0.0, inf}, {0.0, inf}, {-inf, inf}, {-inf, inf}},
                     "beta family, beta = " + std::to_string(beta));
}

Expr beta_family_scalar_curvature(double beta) {
  const Expr x1 = Expr::variable(0);
  const Expr x2 = Expr::variable(1);
  return Expr::pow(x1 * (x1 + Expr::number(beta) * x2), -1.0);
}

// ---------------------------------------------------------------------------

namespace {

struct Connection {
  Matrix g;
  Matrix ginv;
  std::vector<Matrix> gamma;   // gamma[k](i,j)
  std::vector<Matrix> first;   // first[l](i,j) = Gamma_{l,ij}
};

Matrix invert_metric(const Matrix& g) {
  Eigen::FullPivLU<Matrix> lu(g);
  const double scale = g.cwiseAbs().maxCoeff();
  if (scale == 0.0 || !lu.isInvertible() ||
      std::abs(lu.determinant()) <= std::pow(kDegeneracyTol * scale, g.rows())) {
    throw Error(ErrorCode::Degenerate, "metric is degenerate at this point");
  }
  Matrix inv = lu.inverse();
  return 0.5 * (inv + inv.transpose());
}

Connection connection_from(const MetricJet& j) {
  const int n = static_cast<int>(j.g.rows());
  Connection c;
  c.g = j.g;
  c.ginv = invert_metric(j.g);
  c.first.assign(n, Matrix(n, n));
  for (int l = 0; l < n; ++l)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        c.first[l](a, b) = 0.5 * (j.dg[a](b, l) + j.dg[b](a, l) - j.dg[l](a, b));
  c.gamma.assign(n, Matrix::Zero(n, n));
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) c.gamma[k] += c.ginv(k, l) * c.first[l];
  return c;
}

}  // namespace

std::vector<Matrix> christoffel(const MetricChart& chart, const Vector& x) {
  return connection_from(chart.metric_jet(x)).gamma;
}

Model0 riemann_model_at(const MetricChart& chart, const Vector& x) {
  const int n = chart.dim();
  const MetricJet j = chart.metric_jet(x);
  const Connection c = connection_from(j);

  // dgamma[m][k](a,b) = d_m Gamma^k_ab.
  std::vector<std::vector<Matrix>> dgamma(n, std::vector<Matrix>(n, Matrix::Zero(n, n)));
  for (int m = 0; m < n; ++m) {
    const Matrix dginv = -c.ginv * j.dg[m] * c.ginv;
    for (int l = 0; l < n; ++l) {
      Matrix dfirst(n, n);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          dfirst(a, b) = 0.5 * (j.d2g[m][a](b, l) + j.d2g[m][b](a, l) - j.d2g[m][l](a, b));
      for (int k = 0; k < n; ++k) {
        dgamma[m][k] += dginv(k, l) * c.first[l] + c.ginv(k, l) * dfirst;
      }
    }
  }

  // R(d_a,d_b)d_k = Rup[l](a,b,k) d_l, lowered on the last slot.
  Tensor4 rup(n);
  for (int l = 0; l < n; ++l)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int k = 0; k < n; ++k) {
          double v = dgamma[a][l](b, k) - dgamma[b][l](a, k);
          for (int m = 0; m < n; ++m) {
            v += c.gamma[l](a, m) * c.gamma[m](b, k) - c.gamma[l](b, m) * c.gamma[m](a, k);
          }
          rup(a, b, k, l) = v;
        }
  Tensor4 r(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          double v = 0.0;
          for (int m = 0; m < n; ++m) v += rup(a, b, k, m) * c.g(m, l);
          r(a, b, k, l) = v;
        }

  const Signature sig = inertia(c.g);
  return Model0(make_space(sig.p, sig.q, c.g), AlgCurvTensor(curvature_projection(r)));
}

double scalar_curvature_at(const MetricChart& chart, const Vector& x) {
  return scalar_curvature_of_model(riemann_model_at(chart, x));
}

Matrix covariant_hessian(const MetricChart& chart, const Expr& f, const Vector& x) {
  const std::vector<Matrix> gamma = christoffel(chart, x);
  const Jet2 jf = eval_jet2(f, x);
  Matrix h = jf.hess;
  for (int k = 0; k < chart.dim(); ++k) h -= jf.grad(k) * gamma[k];
  return 0.5 * (h + h.transpose());
}

double beta_invariant(double beta, const Vector& x) {
  const MetricChart chart = beta_family_chart(beta);
  const Expr tau = beta_family_scalar_curvature(beta);
  const Expr psi = -Expr::call(Func::Ln, tau);
  const Matrix h = covariant_hessian(chart, psi, x);
  const double t = eval(tau, x);
  return h.topLeftCorner(2, 2).determinant() / (t * t);
}

// ---------------------------------------------------------------------------

namespace {

Vector geodesic_acceleration(const MetricChart& chart, const Vector& x, const Vector& v) {
  const std::vector<Matrix> gamma = christoffel(chart, x);
  Vector acc(chart.dim());
  for (int k = 0; k < chart.dim(); ++k) acc(k) = -v.dot(gamma[k] * v);
  return acc;
}

}  // namespace

GeodesicTrace geodesic(const MetricChart& chart, const Vector& x0, const Vector& v0, double t_end,
                       double step, const GeodesicOptions& opts) {
  if (!(step > 0.0)) throw Error(ErrorCode::BadParameter, "step must be positive");
  if (x0.size() != chart.dim() || v0.size() != chart.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "initial data has wrong dimension");
  }
  if (!chart.in_domain(x0)) throw Error(ErrorCode::DomainError, "initial point outside domain");

  GeodesicTrace tr;
  auto record = [&](double t, const Vector& x, const Vector& v) {
    tr.times.push_back(t);
    tr.points.push_back(x);
    tr.velocities.push_back(v);
    if (opts.record_curvature) tr.scalar_curvatures.push_back(scalar_curvature_at(chart, x));
  };
  record(0.0, x0, v0);

  Vector x = x0;
  Vector v = v0;
  double t = 0.0;
  const long n_steps = static_cast<long>(std::ceil(t_end / step - 1e-9));
  for (long s = 0; s < n_steps; ++s) {
    const double h = std::min(step, t_end - t);
    if (h <= 0.0) break;
    try {
      const Vector k1x = v;
      const Vector k1v = geodesic_acceleration(chart, x, v);
      const Vector x2 = x + 0.5 * h * k1x;
      const Vector v2 = v + 0.5 * h * k1v;
      const Vector k2v = geodesic_acceleration(chart, x2, v2);
      const Vector x3 = x + 0.5 * h * v2;
      const Vector v3 = v + 0.5 * h * k2v;
      const Vector k3v = geodesic_acceleration(chart, x3, v3);
      const Vector x4 = x + h * v3;
      const Vector v4 = v + h * k3v;
      const Vector k4v = geodesic_acceleration(chart, x4, v4);
      const Vector xn = x + (h / 6.0) * (k1x + 2.0 * v2 + 2.0 * v3 + v4);
      const Vector vn = v + (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
      if (!chart.in_domain(xn)) throw Error(ErrorCode::DomainError, "left the chart domain");
      t = (s + 1 == n_steps) ? t_end : t + h;
      record(t, xn, vn);
      x = xn;
      v = vn;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DomainError && e.code() != ErrorCode::Degenerate) throw;
      tr.truncated = true;
      tr.stop_reason = e.what();
      break;
    }
  }
  return tr;
}

double energy_drift(const MetricChart& chart, const GeodesicTrace& trace) {
  if (trace.size() == 0) return 0.0;
  auto energy = [&](std::size_t i) {
    return trace.velocities[i].dot(chart.metric(trace.points[i]) * trace.velocities[i]);
  };
  const double e0 = energy(0);
  double drift = 0.0;
  for (std::size_t i = 1; i < trace.size(); ++i) drift = std::max(drift, std::abs(energy(i) - e0));
  return drift;
}

BlowupFit blowup_exponent(const GeodesicTrace& trace, int coordinate) {
  if (trace.scalar_curvatures.size() != trace.size()) {
    throw Error(ErrorCode::InsufficientSamples, "trace carries no scalar curvature samples");
  }
  bool all_zero = true;
  for (double tau : trace.scalar_curvatures) all_zero = all_zero && std::abs(tau) < 1e-12;
  if (all_zero) throw Error(ErrorCode::ZeroCurvature, "|tau| < 1e-12 along the whole trace");

  std::vector<double> ld, lt;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (coordinate < 0 || coordinate >= trace.points[i].size()) {
      throw Error(ErrorCode::DimensionMismatch, "no such coordinate");
    }
    const double d = trace.points[i](coordinate);
    const double tau = std::abs(trace.scalar_curvatures[i]);
    if (d > 0.0 && tau > 0.0 && std::isfinite(tau)) {
      if (!ld.empty() && !(std::log(d) < ld.back())) {
        throw Error(ErrorCode::InsufficientSamples,
                    "distance to the singular end is not strictly decreasing");
      }
      ld.push_back(std::log(d));
      lt.push_back(std::log(tau));
    }
  }
  if (ld.size() < 8) {
    throw Error(ErrorCode::InsufficientSamples,
                std::to_string(ld.size()) + " usable samples, need at least 8");
  }

  // Thin to about log-uniform spacing; ld is decreasing.
  constexpr int kTargets = 64;
  std::vector<std::size_t> pick;
  const double hi = ld.front();
  const double lo = ld.back();
  std::size_t cursor = 0;
  for (int t = 0; t < kTargets; ++t) {
    const double target = hi - (hi - lo) * t / (kTargets - 1);
    while (cursor + 1 < ld.size() &&
           std::abs(ld[cursor + 1] - target) <= std::abs(ld[cursor] - target)) {
      ++cursor;
    }
    if (pick.empty() || pick.back() != cursor) pick.push_back(cursor);
  }
  if (pick.size() < 8) {
    pick.resize(ld.size());
    for (std::size_t i = 0; i < ld.size(); ++i) pick[i] = i;
  }

  const double n = static_cast<double>(pick.size());
  double sx = 0, sy = 0;
  for (std::size_t i : pick) {
    sx += ld[i];
    sy += lt[i];
  }
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i : pick) {
    sxx += (ld[i] - mx) * (ld[i] - mx);
    sxy += (ld[i] - mx) * (lt[i] - my);
  }
  if (sxx == 0.0) throw Error(ErrorCode::InsufficientSamples, "no spread in distance");
  BlowupFit fit;
  fit.exponent = sxy / sxx;
  double ss = 0;
  for (std::size_t i : pick) {
    const double r = lt[i] - (my + fit.exponent * (ld[i] - mx));
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  fit.samples = pick.size();
  fit.blowup = fit.exponent <= -0.95 && fit.residual < 0.1;
  return fit;
}

}  // namespace pvm
