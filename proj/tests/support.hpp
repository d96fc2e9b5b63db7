#pragma once

// Random model generators and brute-force oracles shared by the unit tests
// and the acceptance binary. Oracles avoid the library's contraction code
// paths on purpose.

#include <cmath>
#include <random>
#include <vector>

#include "pvm/geometry.hpp"
#include "pvm/model.hpp"
#include "pvm/pv.hpp"

namespace pvm::testing {

using Rng = std::mt19937_64;

inline double gauss(Rng& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }

inline Vector random_vector(int n, Rng& rng) {
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = gauss(rng);
  return v;
}

inline Matrix random_matrix(int r, int c, Rng& rng) {
  Matrix m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = gauss(rng);
  return m;
}

inline Matrix random_symmetric(int n, Rng& rng) {
  const Matrix a = random_matrix(n, n, rng);
  return 0.5 * (a + a.transpose());
}

/// Well-conditioned invertible matrix.
inline Matrix random_invertible(int n, Rng& rng) {
  for (;;) {
    const Matrix a = Matrix::Identity(n, n) + 0.4 * random_matrix(n, n, rng);
    Eigen::JacobiSVD<Matrix> svd(a);
    const auto& s = svd.singularValues();
    if (s(n - 1) > 0.2 && s(0) / s(n - 1) < 20) return a;
  }
}

/// Random orthogonal matrix (Euclidean).
inline Matrix random_orthogonal(int n, Rng& rng) {
  Eigen::HouseholderQR<Matrix> qr(random_matrix(n, n, rng));
  return qr.householderQ();
}

/// Exactly symmetric Gram matrix of signature (p, q): P^T diag(-1.., 1..) P.
inline Matrix random_gram(int p, int q, Rng& rng) {
  const int n = p + q;
  Vector d(n);
  for (int i = 0; i < n; ++i) d(i) = i < p ? -1.0 : 1.0;
  const Matrix pm = random_invertible(n, rng);
  Matrix g = pm.transpose() * d.asDiagonal() * pm;
  return 0.5 * (g + g.transpose());
}

/// phi(x,w) phi(y,z) - phi(x,z) phi(y,w): an algebraic curvature tensor
/// for any symmetric phi.
inline Tensor4 phi_tensor(const Matrix& phi) {
  const int n = static_cast<int>(phi.rows());
  Tensor4 t(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) t(i, j, k, l) = phi(i, l) * phi(j, k) - phi(i, k) * phi(j, l);
  return t;
}

inline Tensor4 add(const Tensor4& a, const Tensor4& b, double sb = 1.0) {
  Tensor4 out(a.dim());
  for (std::size_t i = 0; i < out.data().size(); ++i) {
    out.data()[i] = a.data()[i] + sb * b.data()[i];
  }
  return out;
}

/// Generic algebraic curvature tensor: sum of a few phi tensors.
inline Tensor4 random_act(int n, Rng& rng, int terms = 3) {
  Tensor4 t(n);
  for (int s = 0; s < terms; ++s) {
    t = add(t, phi_tensor(random_symmetric(n, rng)), s % 2 == 0 ? 1.0 : -1.0);
  }
  return t;
}

inline Model0 random_model(int p, int q, Rng& rng) {
  return Model0(make_space(p, q, random_gram(p, q, rng)),
                AlgCurvTensor(random_act(p + q, rng)));
}

/// Random nondegenerate k-plane (basis not orthonormal).
inline Subspace random_plane(const InnerProductSpace& space, int k, Rng& rng) {
  for (;;) {
    const Matrix b = random_matrix(space.dim(), k, rng);
    const Matrix xi = b.transpose() * space.gram() * b;
    if (std::abs(xi.determinant()) > 1e-2 * std::pow(b.norm(), 2 * k) / std::pow(k, k)) {
      return Subspace(space, b);
    }
  }
}

// ---------------------------------------------------------------------------
// Oracles.

/// Operator M with <M w, u> = B(w, u): M = G^{-1} B^T read directly off the
/// pairing grid.
inline Matrix operator_from_pairing(const Matrix& gram, const Matrix& pairing) {
  return gram.inverse() * pairing.transpose();
}

/// <J(v)w, u> = A(w, v, v, u), summed literally over coordinates.
inline Matrix jacobi_oracle(const Model0& m, const Vector& v) {
  const int n = m.dim();
  Matrix b = Matrix::Zero(n, n);
  Vector ew = Vector::Zero(n), eu = Vector::Zero(n);
  for (int w = 0; w < n; ++w)
    for (int u = 0; u < n; ++u) {
      ew.setZero();
      eu.setZero();
      ew(w) = 1.0;
      eu(u) = 1.0;
      b(w, u) = m.tensor().evaluate(ew, v, v, eu);
    }
  return operator_from_pairing(m.space().gram(), b);
}

/// Polarization identity 1/2 (J(v1+v2) - J(v1) - J(v2)).
inline Matrix polarized_oracle(const Model0& m, const Vector& v1, const Vector& v2) {
  return 0.5 * (jacobi_oracle(m, v1 + v2) - jacobi_oracle(m, v1) - jacobi_oracle(m, v2));
}

/// Literal sum_{ij} xi^{ij} J(v_i, v_j).
inline Matrix higher_jacobi_oracle(const Model0& m, const Matrix& basis) {
  const Matrix xi = basis.transpose() * m.space().gram() * basis;
  const Matrix xinv = xi.inverse();
  Matrix out = Matrix::Zero(m.dim(), m.dim());
  for (int i = 0; i < basis.cols(); ++i)
    for (int j = 0; j < basis.cols(); ++j)
      out += xinv(i, j) * polarized_oracle(m, basis.col(i), basis.col(j));
  return out;
}

/// rho = sum g^{ij} J(e_i, e_j).
inline Matrix ricci_oracle(const Model0& m) {
  return higher_jacobi_oracle(m, Matrix::Identity(m.dim(), m.dim()));
}

/// max over i <= j of ||[rho, J(e_i, e_j)]||, unscaled.
inline double brute_commutator(const Model0& m) {
  const Matrix rho = ricci_oracle(m);
  double worst = 0.0;
  const Matrix id = Matrix::Identity(m.dim(), m.dim());
  for (int i = 0; i < m.dim(); ++i)
    for (int j = i; j < m.dim(); ++j) {
      const Matrix jij = polarized_oracle(m, id.col(i), id.col(j));
      worst = std::max(worst, (rho * jij - jij * rho).norm());
    }
  return worst;
}

// ---------------------------------------------------------------------------
// Model families.

/// Riemannian direct sum of constant-curvature blocks.
inline Model0 einstein_sum(const std::vector<int>& dims, const std::vector<double>& constants) {
  Model0 out = constant_curvature_model(make_space(0, dims[0]), constants[0]);
  for (std::size_t b = 1; b < dims.size(); ++b) {
    out = direct_sum(out, constant_curvature_model(make_space(0, dims[b]), constants[b]));
  }
  return out;
}

/// Lorentzian block on (u, w, e_1..e_k) with <u,w> = 1, <e_i,e_j> = delta,
/// whose only curvature is A(u, e_i, e_j, u) = a_ij (a symmetric). The Ricci
/// operator maps u to tr(a) w and kills everything else: one nilpotent 2x2
/// Jordan block. Puffini-Videv for any a.
inline Model0 null_wave_block(const Matrix& a) {
  const int k = static_cast<int>(a.rows());
  const int n = k + 2;
  Matrix g = Matrix::Zero(n, n);
  g(0, 1) = g(1, 0) = 1.0;
  for (int i = 0; i < k; ++i) g(2 + i, 2 + i) = 1.0;
  Tensor4 t(n);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      const double v = 0.5 * (a(i, j) + a(j, i));
      // u = 0, e_i = 2 + i.
      t(0, 2 + i, 2 + j, 0) = v;
      t(2 + i, 0, 0, 2 + j) = v;
      t(0, 2 + i, 0, 2 + j) = -v;
      t(2 + i, 0, 2 + j, 0) = -v;
    }
  return Model0(make_space(1, k + 1, g), AlgCurvTensor(std::move(t)));
}

// ---------------------------------------------------------------------------
// Finite-difference geometry oracles (independent of Jet2).

inline Matrix fd_metric_derivative(const MetricChart& c, const Vector& x, int k, double h) {
  Vector xp = x, xm = x;
  xp(k) += h;
  xm(k) -= h;
  return (c.metric(xp) - c.metric(xm)) / (2 * h);
}

/// Gamma[k](i,j) from central differences of g.
inline std::vector<Matrix> fd_christoffel(const MetricChart& c, const Vector& x, double h = 1e-5) {
  const int n = c.dim();
  const Matrix ginv = c.metric(x).inverse();
  std::vector<Matrix> dg;
  for (int k = 0; k < n; ++k) dg.push_back(fd_metric_derivative(c, x, k, h));
  std::vector<Matrix> gamma(n, Matrix::Zero(n, n));
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l)
          gamma[k](i, j) += 0.5 * ginv(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
  return gamma;
}

/// R_ijkl = <R(d_i,d_j)d_k, d_l> from finite differences of the finite
/// difference Christoffel symbols.
inline Tensor4 fd_riemann(const MetricChart& c, const Vector& x, double h = 1e-4) {
  const int n = c.dim();
  const std::vector<Matrix> gamma = fd_christoffel(c, x, 1e-6);
  std::vector<std::vector<Matrix>> dgamma(n);  // dgamma[m][l] = d_m Gamma^l
  for (int m = 0; m < n; ++m) {
    Vector xp = x, xm = x;
    xp(m) += h;
    xm(m) -= h;
    const auto gp = fd_christoffel(c, xp, 1e-6);
    const auto gm = fd_christoffel(c, xm, 1e-6);
    for (int l = 0; l < n; ++l) dgamma[m].push_back((gp[l] - gm[l]) / (2 * h));
  }
  const Matrix g = c.metric(x);
  Tensor4 out(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        Vector up(n);
        for (int l = 0; l < n; ++l) {
          double v = dgamma[i][l](j, k) - dgamma[j][l](i, k);
          for (int m = 0; m < n; ++m) {
            v += gamma[l](i, m) * gamma[m](j, k) - gamma[l](j, m) * gamma[m](i, k);
          }
          up(l) = v;
        }
        const Vector low = g * up;
        for (int l = 0; l < n; ++l) out(i, j, k, l) = low(l);
      }
  return out;
}

// ---------------------------------------------------------------------------
// Random expressions that stay finite and differentiable on [-1, 1]^n.

inline Expr random_expr(Rng& rng, int depth, int n_vars) {
  std::uniform_int_distribution<int> pick(0, 11);
  auto num = [&](double lo, double hi) {
    return Expr::number(std::uniform_real_distribution<double>(lo, hi)(rng));
  };
  if (depth == 0) {
    if (pick(rng) % 3 == 0) return num(0.5, 2.0);
    return Expr::variable(std::uniform_int_distribution<int>(0, n_vars - 1)(rng));
  }
  const Expr a = random_expr(rng, depth - 1, n_vars);
  const Expr b = random_expr(rng, depth - 1, n_vars);
  switch (pick(rng)) {
    case 0: return a + b;
    case 1: return a - b;
    case 2: return a * b;
    case 3: return a / (Expr::number(1.5) + Expr::call(Func::Cos, b));
    case 4: return Expr::pow(a, 2.0);
    case 5: return Expr::pow(a, 3.0);
    case 6: return Expr::pow(Expr::call(Func::Cosh, a), 0.5);
    case 7: return Expr::pow(Expr::call(Func::Cosh, a), -1.0);
    case 8: return Expr::call(Func::Exp, Expr::number(0.5) * a);
    case 9: return Expr::call(Func::Ln, Expr::number(1.0) + a * a);
    case 10: return Expr::call(pick(rng) % 2 ? Func::Sin : Func::Cos, a);
    default: return -Expr::call(pick(rng) % 2 ? Func::Sinh : Func::Cosh, Expr::number(0.5) * a);
  }
}

/// Central-difference gradient from values only.
inline Vector fd_gradient(const Expr& e, const Vector& x, double h) {
  Vector g(x.size());
  for (int i = 0; i < x.size(); ++i) {
    Vector xp = x, xm = x;
    xp(i) += h;
    xm(i) -= h;
    g(i) = (eval(e, xp) - eval(e, xm)) / (2 * h);
  }
  return g;
}

/// Second central differences from values only; h around 1e-4 balances
/// truncation against rounding.
inline Matrix fd_hessian(const Expr& e, const Vector& x, double h) {
  const int n = static_cast<int>(x.size());
  Matrix hm(n, n);
  auto f = [&](int i, double si, int j, double sj) {
    Vector y = x;
    y(i) += si * h;
    y(j) += sj * h;
    return eval(e, y);
  };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      hm(i, j) = (f(i, 1, j, 1) - f(i, 1, j, -1) - f(i, -1, j, 1) + f(i, -1, j, -1)) / (4 * h * h);
    }
  return hm;
}

/// e^{2 alpha} = 4 r^2 / (1 + x1^2 + x2^2)^2: round sphere of radius r.
inline Expr sphere_alpha(double r) {
  return parse("ln(" + std::to_string(2.0 * r) + "/(1 + x1^2 + x2^2))", 2);
}

}  // namespace pvm::testing
