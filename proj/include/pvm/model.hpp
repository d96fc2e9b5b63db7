#pragma once

// Algebraic curvature tensors, 0-models and the Jacobi-type operators built
// from them.

#include <optional>
#include <span>
#include <vector>

#include "pvm/linalg.hpp"

namespace pvm {

/// Dense m x m x m x m array of reals with no symmetry assumptions.
class Tensor4 {
 public:
  Tensor4() = default;
  explicit Tensor4(int dim) : m_(dim), d_(static_cast<std::size_t>(dim) * dim * dim * dim, 0.0) {}

  int dim() const { return m_; }
  double& operator()(int i, int j, int k, int l) { return d_[index(i, j, k, l)]; }
  double operator()(int i, int j, int k, int l) const { return d_[index(i, j, k, l)]; }

  double max_abs() const;
  std::span<const double> data() const { return d_; }
  std::span<double> data() { return d_; }

 private:
  std::size_t index(int i, int j, int k, int l) const {
    return ((static_cast<std::size_t>(i) * m_ + j) * m_ + k) * m_ + l;
  }

  int m_ = 0;
  std::vector<double> d_;
};

/// Largest violation of each curvature identity.
struct SymmetryReport {
  double antisymmetry = 0.0;   // A(i,j,k,l) + A(j,i,k,l)
  double pair_symmetry = 0.0;  // A(i,j,k,l) - A(k,l,i,j)
  double bianchi = 0.0;        // A(i,j,k,l) + A(j,k,i,l) + A(k,i,j,l)

  double max() const;
  bool passes(double tol = 1e-12) const { return max() < tol; }
};

SymmetryReport validate_symmetries(const Tensor4& t);

/// A 4-tensor with the symmetries of the Riemann tensor. Construction checks
/// the identities to 1e-12 relative to max(1, max|A|).
class AlgCurvTensor {
 public:
  AlgCurvTensor() = default;
  explicit AlgCurvTensor(Tensor4 t);
  static AlgCurvTensor zero(int dim) { return AlgCurvTensor(Tensor4(dim)); }

  int dim() const { return t_.dim(); }
  double operator()(int i, int j, int k, int l) const { return t_(i, j, k, l); }
  const Tensor4& raw() const { return t_; }
  double max_abs() const { return t_.max_abs(); }

  /// A(x1,x2,x3,x4) for arbitrary vectors.
  double evaluate(const Vector& x1, const Vector& x2, const Vector& x3, const Vector& x4) const;

 private:
  Tensor4 t_;
};

/// One generator A(i,j,k,l) = value with 0-based indices.
struct CurvatureEntry {
  int i, j, k, l;
  double value;
};

/// Completes the generators under antisymmetry and pair symmetry; every
/// other slot is zero. Throws SymmetryConflict or BianchiViolation.
AlgCurvTensor tensor_from_components(int dim, std::span<const CurvatureEntry> generators);

/// Projects an arbitrary 4-tensor onto the algebraic curvature tensors:
/// symmetrizes under the Riemann symmetries, then removes the totally
/// antisymmetric part that the cyclic identity forbids.
Tensor4 curvature_projection(const Tensor4& t);

/// Components of t in a new basis whose vectors are the columns of `p`
/// (m x k); the result is k-dimensional.
Tensor4 pullback(const Tensor4& t, const Matrix& p);

/// (V, <.,.>, A).
class Model0 {
 public:
  Model0(InnerProductSpace space, AlgCurvTensor tensor);

  const InnerProductSpace& space() const { return space_; }
  const AlgCurvTensor& tensor() const { return tensor_; }
  int dim() const { return space_.dim(); }

 private:
  InnerProductSpace space_;
  AlgCurvTensor tensor_;
};

/// A(x,y,z,w) = c(<x,w><y,z> - <x,z><y,w>).
Model0 constant_curvature_model(const InnerProductSpace& space, double c);

/// Orthogonal direct sum with block-diagonal gram and block tensor.
Model0 direct_sum(const Model0& a, const Model0& b);

/// The same model written in the basis given by the columns of `p`
/// (invertible m x m).
Model0 change_basis(const Model0& m, const Matrix& p);

/// Restriction of the model to the nondegenerate span of `basis`, expressed
/// in that basis.
Model0 restrict_model(const Model0& m, const Matrix& basis);

/// B(w,u) = sum_{b,c} A(w,b,c,u) s(b,c).
Matrix contract_middle(const AlgCurvTensor& a, const Matrix& s);

/// <A(v1,v2)x, y> = A(v1,v2,x,y).
LinearOperator curvature_operator(const Model0& m, const Vector& v1, const Vector& v2);

/// <J(v)w, u> = A(w,v,v,u).
LinearOperator jacobi(const Model0& m, const Vector& v);

/// J(v1,v2) = 1/2 (J(v1+v2) - J(v1) - J(v2)), the symmetric bilinear
/// extension of J.
LinearOperator jacobi_polarized(const Model0& m, const Vector& v1, const Vector& v2);

/// J(pi) = sum_{ij} xi^{ij} J(v_i, v_j); independent of the basis of pi.
LinearOperator higher_jacobi(const Model0& m, const Subspace& pi);

/// rho = J(V).
LinearOperator ricci(const Model0& m);

/// tau = sum g^{jk} g^{il} A_{ijkl} = tr(rho).
double scalar_curvature_of_model(const Model0& m);

/// Orthonormal basis of span{ A(e_i,e_j)e_k }, or nullopt for a zero tensor.
std::optional<Matrix> curvature_range(const Model0& m, double tol = 1e-9);

}  // namespace pvm
