#pragma once

// Riemannian geometry of coordinate charts whose metric components are
// closed-form expressions: Levi-Civita connection, curvature as a 0-model
// at a point, scalar curvature, geodesics and blowup rates, plus the two
// explicit Puffini-Videv families (cones over surfaces and the
// beta-family of warped metrics).

#include <limits>
#include <string>
#include <vector>

#include "pvm/expr.hpp"
#include "pvm/model.hpp"

namespace pvm {

/// Open interval; either end may be infinite.
struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  bool contains(double x) const { return x > lo && x < hi; }
};

/// g, dg[k] = d_k g and d2g[k][l] = d_k d_l g at one point.
struct MetricJet {
  Matrix g;
  std::vector<Matrix> dg;
  std::vector<std::vector<Matrix>> d2g;
};

class MetricChart {
 public:
  /// `components` is n x n row-major; entry (i,j) must be structurally equal
  /// to entry (j,i).
  MetricChart(int dim, std::vector<Expr> components, std::vector<Interval> domain,
              std::string label);

  int dim() const { return n_; }
  const Expr& component(int i, int j) const { return comps_[i * n_ + j]; }
  const std::vector<Interval>& domain() const { return domain_; }
  const std::string& label() const { return label_; }

  bool in_domain(const Vector& x) const;

  /// Throws DomainError outside the domain box or when an expression cannot
  /// be evaluated.
  Matrix metric(const Vector& x) const;
  MetricJet metric_jet(const Vector& x) const;

 private:
  void require_domain(const Vector& x) const;

  int n_;
  std::vector<Expr> comps_;
  std::vector<Interval> domain_;
  std::string label_;
};

/// (t, x1, x2) with g = diag(1, t^2 e^{2 alpha}, t^2 e^{2 alpha}) on
/// (t_min, inf) x R^2: the cone over the surface e^{2 alpha}(dx1^2 + dx2^2).
/// `alpha` is written in the surface coordinates x1, x2.
MetricChart cone_chart(const Expr& alpha, double t_min);

/// The surface e^{2 alpha}(dx1^2 + dx2^2) itself.
MetricChart conformal_surface_chart(const Expr& alpha);

/// g = diag(1, 1, x1^2, x1 (x1 + beta x2)) on (0,inf) x (0,inf) x R^2.
/// Throws BadParameter unless beta > 0.
MetricChart beta_family_chart(double beta);

/// tau = 1 / (x1 (x1 + beta x2)) for the beta family, as an expression.
Expr beta_family_scalar_curvature(double beta);

/// Gamma[k](i,j) = 1/2 g^{kl} (d_i g_jl + d_j g_il - d_l g_ij).
std::vector<Matrix> christoffel(const MetricChart& chart, const Vector& x);

/// The 0-model (T_x M, g(x), R(x)) with R_ijkl = <R(d_i,d_j)d_k, d_l> and
/// R(X,Y) = [nabla_X, nabla_Y] - nabla_[X,Y]. With this convention a round
/// sphere has R(X,Y,Y,X) > 0.
Model0 riemann_model_at(const MetricChart& chart, const Vector& x);

double scalar_curvature_at(const MetricChart& chart, const Vector& x);

/// H_ij = d_i d_j f - Gamma^k_ij d_k f.
Matrix covariant_hessian(const MetricChart& chart, const Expr& f, const Vector& x);

/// det(H restricted to span{d_x1, d_x2}) / tau^2 for Psi = -ln tau on the
/// beta family. Independent of x, and equal to beta^2.
double beta_invariant(double beta, const Vector& x);

struct GeodesicOptions {
  /// Sample scalar curvature at every recorded point.
  bool record_curvature = true;
};

struct GeodesicTrace {
  std::vector<double> times;
  std::vector<Vector> points;
  std::vector<Vector> velocities;
  std::vector<double> scalar_curvatures;  // empty unless recorded
  /// Set when the curve left the domain (or hit an unevaluable point)
  /// before t_end.
  bool truncated = false;
  std::string stop_reason;

  std::size_t size() const { return times.size(); }
};

/// Classical fixed-step RK4 for x'' = -Gamma(x)(x', x').
GeodesicTrace geodesic(const MetricChart& chart, const Vector& x0, const Vector& v0, double t_end,
                       double step, const GeodesicOptions& opts = {});

/// max |g(x(t))(x',x') - g(x0)(v0,v0)| over the trace.
double energy_drift(const MetricChart& chart, const GeodesicTrace& trace);

struct BlowupFit {
  double exponent = 0.0;
  double residual = 0.0;  // RMS residual of the fit in ln|tau|
  std::size_t samples = 0;
  bool blowup = false;
};

/// Least-squares slope of ln|tau| against ln d along a trace, where d is the
/// value of `coordinate` (distance to the singular end for unit-speed curves
/// heading towards coordinate 0). Samples are thinned to roughly
/// log-uniform spacing in d before fitting.
BlowupFit blowup_exponent(const GeodesicTrace& trace, int coordinate = 0);

}  // namespace pvm
