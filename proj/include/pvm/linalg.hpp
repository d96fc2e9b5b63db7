#pragma once

// Signature-aware linear algebra: inner product spaces of arbitrary
// signature, nondegenerate subspaces, complements, real invariant-subspace
// decomposition of operators and random sampling of Grassmannians.

#include <complex>
#include <compare>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "pvm/errors.hpp"

namespace pvm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Default degeneracy tolerance, relative to the largest matrix entry.
inline constexpr double kDegeneracyTol = 1e-9;

/// Counts of negative and positive directions of a symmetric form.
struct Signature {
  int p = 0;  // negative
  int q = 0;  // positive

  int dim() const { return p + q; }
  friend bool operator==(const Signature&, const Signature&) = default;
};

/// Signature (r,s) of a nondegenerate subspace, r timelike and s spacelike.
struct GrassmannSignature {
  int r = 0;
  int s = 0;

  int dim() const { return r + s; }
  friend auto operator<=>(const GrassmannSignature&, const GrassmannSignature&) = default;
};

/// Inertia of a symmetric matrix. Eigenvalues with magnitude below
/// `tol * max|M_ij|` make the matrix degenerate and raise Degenerate.
Signature inertia(const Matrix& symmetric, double tol = kDegeneracyTol);

/// A real operator on the working basis of an m-dimensional space.
class LinearOperator {
 public:
  LinearOperator() = default;
  explicit LinearOperator(Matrix m);
  static LinearOperator zero(int dim);
  static LinearOperator identity(int dim);

  const Matrix& matrix() const { return m_; }
  int dim() const { return static_cast<int>(m_.rows()); }
  double operator()(int i, int j) const { return m_(i, j); }
  double norm() const { return m_.norm(); }

  Vector apply(const Vector& v) const;

  friend LinearOperator operator+(const LinearOperator& a, const LinearOperator& b);
  friend LinearOperator operator-(const LinearOperator& a, const LinearOperator& b);
  friend LinearOperator operator*(const LinearOperator& a, const LinearOperator& b);
  friend LinearOperator operator*(double s, const LinearOperator& a);

 private:
  Matrix m_;
};

/// [a,b] = ab - ba.
LinearOperator commutator(const LinearOperator& a, const LinearOperator& b);

/// Finite-dimensional space with a nondegenerate symmetric bilinear form.
class InnerProductSpace {
 public:
  /// Builds the space of signature (p,q). Without a gram matrix the form is
  /// diag(-1 x p, +1 x q). A supplied gram must be exactly symmetric, have
  /// inertia (p,q) and be nondegenerate.
  static InnerProductSpace make(int p, int q, std::optional<Matrix> gram = std::nullopt,
                                double tol = kDegeneracyTol);

  int dim() const { return static_cast<int>(gram_.rows()); }
  const Matrix& gram() const { return gram_; }
  const Matrix& gram_inverse() const { return gram_inv_; }
  Signature signature() const { return sig_; }
  bool riemannian() const { return sig_.p == 0; }

  double inner(const Vector& a, const Vector& b) const { return a.dot(gram_ * b); }

 private:
  InnerProductSpace(Matrix gram, Matrix gram_inv, Signature sig)
      : gram_(std::move(gram)), gram_inv_(std::move(gram_inv)), sig_(sig) {}

  Matrix gram_;
  Matrix gram_inv_;
  Signature sig_;
};

inline InnerProductSpace make_space(int p, int q, std::optional<Matrix> gram = std::nullopt,
                                    double tol = kDegeneracyTol) {
  return InnerProductSpace::make(p, q, std::move(gram), tol);
}

/// A nondegenerate k-plane given by a basis of column vectors, together with
/// the induced gram matrix xi and its inverse.
class Subspace {
 public:
  Subspace(const InnerProductSpace& ambient, Matrix basis, double tol = kDegeneracyTol);

  const InnerProductSpace& ambient() const { return ambient_; }
  const Matrix& basis() const { return basis_; }
  const Matrix& induced_gram() const { return xi_; }
  const Matrix& induced_gram_inverse() const { return xi_inv_; }
  GrassmannSignature signature() const { return sig_; }
  int dim() const { return static_cast<int>(basis_.cols()); }
  int ambient_dim() const { return static_cast<int>(basis_.rows()); }

  /// basis * xi^{-1} * basis^T, the contravariant form of the restricted
  /// metric; contracting it against a tensor sums over a dual pair of bases.
  Matrix dual_pairing() const;

 private:
  InnerProductSpace ambient_;
  Matrix basis_;
  Matrix xi_;
  Matrix xi_inv_;
  GrassmannSignature sig_;
};

/// The whole space with its working basis.
Subspace full_space(const InnerProductSpace& space);

/// pi^perp = { w : <w,v> = 0 for all v in pi }.
Subspace orthogonal_complement(const InnerProductSpace& space, const Subspace& pi,
                               double tol = kDegeneracyTol);
inline Subspace orthogonal_complement(const Subspace& pi, double tol = kDegeneracyTol) {
  return orthogonal_complement(pi.ambient(), pi, tol);
}

/// One block of the real invariant-subspace decomposition of an operator.
struct InvariantBlock {
  /// Representative eigenvalue; for a conjugate pair the member with
  /// positive imaginary part.
  std::complex<double> value;
  bool complex_pair = false;
  /// Raw eigenvalues merged into this cluster (both halves of a pair).
  std::vector<std::complex<double>> members;
  /// Euclidean-orthonormal columns spanning the generalized eigenspace.
  Matrix basis;

  int dim() const { return static_cast<int>(basis.cols()); }
};

/// Decomposes V into generalized eigenspaces of real eigenvalues and real
/// forms of conjugate pairs. Eigenvalues are clustered when
/// |l_i - l_j| < tol * (1 + max|l|).
std::vector<InvariantBlock> real_generalized_eigenspaces(const LinearOperator& op, double tol);

/// (r,s) with 0 <= r <= p, 0 <= s <= q, 1 <= r+s <= m-1, lexicographic.
std::vector<GrassmannSignature> admissible_signatures(const InnerProductSpace& space);

struct SamplerOptions {
  /// A pivot <w,w> is rejected when |<w,w>| < pivot_tol * |w|^2 * |G|.
  double pivot_tol = 1e-3;
  int max_draws = 20000;
};

/// Draws a nondegenerate plane of signature `sig`, deterministic in `seed`.
Subspace grassmann_sample(const InnerProductSpace& space, GrassmannSignature sig,
                          std::uint64_t seed, const SamplerOptions& opts = {});

/// Euclidean-orthonormal basis of the column span of `m`, with rank decided
/// relative to the largest singular value.
Matrix orthonormal_span(const Matrix& m, double tol = kDegeneracyTol);

/// Frobenius distance between the Euclidean orthogonal projectors onto the
/// column spans of `a` and `b`.
double projector_distance(const Matrix& a, const Matrix& b);

}  // namespace pvm
