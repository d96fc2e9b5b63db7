#include "pvm/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace pvm {

namespace {

std::string shape(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace

Signature inertia(const Matrix& symmetric, double tol) {
  if (symmetric.rows() != symmetric.cols() || symmetric.rows() == 0) {
    throw Error(ErrorCode::DimensionMismatch, "inertia of a " + shape(symmetric) + " matrix");
  }
  const double scale = symmetric.cwiseAbs().maxCoeff();
  if (scale == 0.0) throw Error(ErrorCode::Degenerate, "zero form");
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetric, Eigen::EigenvaluesOnly);
  Signature sig;
  for (double ev : es.eigenvalues()) {
    if (std::abs(ev) <= tol * scale) {
      throw Error(ErrorCode::Degenerate,
                  "eigenvalue " + std::to_string(ev) + " below degeneracy tolerance");
    }
    (ev < 0 ? sig.p : sig.q) += 1;
  }
  return sig;
}

// ---------------------------------------------------------------------------
// LinearOperator

LinearOperator::LinearOperator(Matrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "operator matrix must be square, got " + shape(m_));
  }
}

LinearOperator LinearOperator::zero(int dim) { return LinearOperator(Matrix::Zero(dim, dim)); }

LinearOperator LinearOperator::identity(int dim) {
  return LinearOperator(Matrix::Identity(dim, dim));
}

Vector LinearOperator::apply(const Vector& v) const {
  if (v.size() != m_.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "vector of size " + std::to_string(v.size()));
  }
  return m_ * v;
}

static void require_same_dim(const LinearOperator& a, const LinearOperator& b) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorCode::DimensionMismatch,
                std::to_string(a.dim()) + " vs " + std::to_string(b.dim()));
  }
}

LinearOperator operator+(const LinearOperator& a, const LinearOperator& b) {
  require_same_dim(a, b);
  return LinearOperator(a.m_ + b.m_);
}

LinearOperator operator-(const LinearOperator& a, const LinearOperator& b) {
  require_same_dim(a, b);
  return LinearOperator(a.m_ - b.m_);
}

LinearOperator operator*(const LinearOperator& a, const LinearOperator& b) {
  require_same_dim(a, b);
  return LinearOperator(a.m_ * b.m_);
}

LinearOperator operator*(double s, const LinearOperator& a) { return LinearOperator(s * a.m_); }

LinearOperator commutator(const LinearOperator& a, const LinearOperator& b) {
  require_same_dim(a, b);
  return LinearOperator(a.matrix() * b.matrix() - b.matrix() * a.matrix());
}

// ---------------------------------------------------------------------------
// InnerProductSpace

InnerProductSpace InnerProductSpace::make(int p, int q, std::optional<Matrix> gram, double tol) {
  if (p < 0 || q < 0 || p + q < 1) {
    throw Error(ErrorCode::BadParameter,
                "signature (" + std::to_string(p) + "," + std::to_string(q) + ")");
  }
  const int m = p + q;
  if (!gram) {
    Matrix g = Matrix::Identity(m, m);
    for (int i = 0; i < p; ++i) g(i, i) = -1.0;
    return InnerProductSpace(g, g, Signature{p, q});
  }
  if (gram->rows() != m || gram->cols() != m) {
    throw Error(ErrorCode::DimensionMismatch,
                "gram is " + shape(*gram) + " but p+q = " + std::to_string(m));
  }
  if (*gram != gram->transpose()) {
    throw Error(ErrorCode::BadParameter, "gram matrix is not symmetric");
  }
  const Signature sig = inertia(*gram, tol);
  if (sig != Signature{p, q}) {
    throw Error(ErrorCode::SignatureMismatch,
                "gram has inertia (" + std::to_string(sig.p) + "," + std::to_string(sig.q) +
                    "), expected (" + std::to_string(p) + "," + std::to_string(q) + ")");
  }
  Matrix inv = gram->fullPivLu().inverse();
  // Symmetrize so that G^{-1} is exactly symmetric like G.
  inv = 0.5 * (inv + inv.transpose()).eval();
  return InnerProductSpace(std::move(*gram), std::move(inv), sig);
}

// ---------------------------------------------------------------------------
// Subspace

Subspace::Subspace(const InnerProductSpace& ambient, Matrix basis, double tol)
    : ambient_(ambient), basis_(std::move(basis)) {
  const int m = ambient_.dim();
  if (basis_.rows() != m) {
    throw Error(ErrorCode::DimensionMismatch,
                "basis is " + shape(basis_) + " in a " + std::to_string(m) + "-dim space");
  }
  const int k = static_cast<int>(basis_.cols());
  if (k < 1 || k > m) {
    throw Error(ErrorCode::DimensionMismatch, "subspace dimension " + std::to_string(k));
  }
  const Matrix q = orthonormal_span(basis_, tol);
  if (q.cols() != k) {
    throw Error(ErrorCode::Degenerate, "basis has rank " + std::to_string(q.cols()) + " < " +
                                           std::to_string(k));
  }
  const Matrix& g = ambient_.gram();
  const double gscale = g.cwiseAbs().maxCoeff();
  // Nondegeneracy is judged on an orthonormal basis of the span so that it
  // does not depend on how the caller chose the basis.
  Eigen::SelfAdjointEigenSolver<Matrix> es(q.transpose() * g * q, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().cwiseAbs().minCoeff() <= tol * gscale) {
    throw Error(ErrorCode::Degenerate, "restricted form is degenerate");
  }

  xi_ = basis_.transpose() * g * basis_;
  xi_ = 0.5 * (xi_ + xi_.transpose()).eval();
  xi_inv_ = xi_.fullPivLu().inverse();
  xi_inv_ = 0.5 * (xi_inv_ + xi_inv_.transpose()).eval();
  const double residual = (xi_ * xi_inv_ - Matrix::Identity(k, k)).cwiseAbs().maxCoeff();
  if (!(residual < 1e-10)) {
    throw Error(ErrorCode::Degenerate,
                "induced gram inversion residual " + std::to_string(residual));
  }
  const Signature sig = inertia(xi_, 1e-14);
  sig_ = GrassmannSignature{sig.p, sig.q};
}

Matrix Subspace::dual_pairing() const { return basis_ * xi_inv_ * basis_.transpose(); }

Subspace full_space(const InnerProductSpace& space) {
  return Subspace(space, Matrix::Identity(space.dim(), space.dim()));
}

Subspace orthogonal_complement(const InnerProductSpace& space, const Subspace& pi, double tol) {
  const int m = space.dim();
  const int k = pi.dim();
  if (pi.ambient_dim() != m) {
    throw Error(ErrorCode::DimensionMismatch, "subspace lives in another space");
  }
  if (k == m) {
    throw Error(ErrorCode::BadParameter, "complement of the whole space is zero");
  }
  // Kernel of basis^T G, read off the trailing right singular vectors.
  const Matrix constraints = pi.basis().transpose() * space.gram();
  Eigen::JacobiSVD<Matrix> svd(constraints, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i) {
    if (sv(i) > tol * sv(0)) ++rank;
  }
  if (rank != k) {
    throw Error(ErrorCode::Degenerate, "complement construction has rank " +
                                           std::to_string(m - rank) + ", expected " +
                                           std::to_string(m - k));
  }
  return Subspace(space, svd.matrixV().rightCols(m - k), tol);
}

// ---------------------------------------------------------------------------
// Generalized eigenspaces

namespace {

struct Cluster {
  std::vector<int> members;
  std::complex<double> centroid;
};

// Right singular vectors for the `d` smallest singular values of `n`, and the
// largest of those singular values.
std::pair<Matrix, double> trailing_kernel(const Matrix& n, int d) {
  Eigen::JacobiSVD<Matrix> svd(n, Eigen::ComputeFullV);
  const int m = static_cast<int>(n.cols());
  return {svd.matrixV().rightCols(d), svd.singularValues()(m - d)};
}

Matrix matrix_power(const Matrix& a, int j) {
  Matrix r = Matrix::Identity(a.rows(), a.cols());
  for (int i = 0; i < j; ++i) r = r * a;
  return r;
}

// Smallest power j for which ker(base^j) has dimension d; falls back to the
// algebraic bound j = max_power.
Matrix generalized_kernel(const Matrix& base, int d, int max_power, double tol) {
  const double s = std::max(base.norm(), 1e-300);
  for (int j = 1; j < max_power; ++j) {
    auto [basis, sigma] = trailing_kernel(matrix_power(base / s, j), d);
    if (sigma <= 10.0 * tol) return basis;
  }
  return trailing_kernel(matrix_power(base / s, max_power), d).first;
}

}  // namespace

std::vector<InvariantBlock> real_generalized_eigenspaces(const LinearOperator& op, double tol) {
  const int m = op.dim();
  if (m == 0) return {};
  Eigen::EigenSolver<Matrix> es(op.matrix(), false);
  if (es.info() != Eigen::Success) {
    throw Error(ErrorCode::ClusterAmbiguity, "eigenvalue iteration did not converge");
  }
  const Eigen::VectorXcd lambda = es.eigenvalues();
  double lmax = 0.0;
  for (int i = 0; i < m; ++i) lmax = std::max(lmax, std::abs(lambda(i)));
  const double thr = tol * (1.0 + lmax);

  // Single-linkage clustering in the complex plane.
  std::vector<int> parent(m);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      if (std::abs(lambda(i) - lambda(j)) < thr) parent[find(i)] = find(j);
    }
  }
  std::vector<Cluster> clusters;
  {
    std::vector<int> slot(m, -1);
    for (int i = 0; i < m; ++i) {
      const int r = find(i);
      if (slot[r] < 0) {
        slot[r] = static_cast<int>(clusters.size());
        clusters.push_back({});
      }
      clusters[slot[r]].members.push_back(i);
    }
  }
  for (auto& c : clusters) {
    std::complex<double> sum = 0.0;
    for (int i : c.members) sum += lambda(i);
    c.centroid = sum / static_cast<double>(c.members.size());
    for (int i : c.members) {
      for (int j : c.members) {
        if (std::abs(lambda(i) - lambda(j)) > 2.0 * thr) {
          throw Error(ErrorCode::ClusterAmbiguity,
                      "eigenvalues chained into one cluster of diameter " +
                          std::to_string(std::abs(lambda(i) - lambda(j))));
        }
      }
    }
  }

  std::vector<InvariantBlock> blocks;
  const Matrix a = op.matrix();
  const Matrix id = Matrix::Identity(m, m);
  for (std::size_t ci = 0; ci < clusters.size(); ++ci) {
    const Cluster& c = clusters[ci];
    const int k = static_cast<int>(c.members.size());
    InvariantBlock block;
    if (std::abs(c.centroid.imag()) <= thr) {
      const double value = c.centroid.real();
      block.value = value;
      for (int i : c.members) block.members.push_back(lambda(i));
      block.basis = generalized_kernel(a - value * id, k, k, tol);
    } else {
      if (c.centroid.imag() < 0) continue;
      const Cluster* partner = nullptr;
      for (const Cluster& o : clusters) {
        if (&o != &c && std::abs(o.centroid - std::conj(c.centroid)) < thr) partner = &o;
      }
      if (partner == nullptr || partner->members.size() != c.members.size()) {
        throw Error(ErrorCode::ClusterAmbiguity, "complex cluster without a conjugate partner");
      }
      const double re = c.centroid.real();
      const double im = c.centroid.imag();
      block.value = c.centroid;
      block.complex_pair = true;
      for (int i : c.members) block.members.push_back(lambda(i));
      for (int i : partner->members) block.members.push_back(lambda(i));
      const Matrix shifted = a - re * id;
      block.basis = generalized_kernel(shifted * shifted + im * im * id, 2 * k, k, tol);
    }
    blocks.push_back(std::move(block));
  }

  std::sort(blocks.begin(), blocks.end(), [](const InvariantBlock& x, const InvariantBlock& y) {
    if (x.value.real() != y.value.real()) return x.value.real() > y.value.real();
    return x.value.imag() > y.value.imag();
  });

  Matrix all(m, m);
  int col = 0;
  for (const auto& b : blocks) {
    all.middleCols(col, b.dim()) = b.basis;
    col += b.dim();
  }
  if (col != m || orthonormal_span(all, 1e-8).cols() != m) {
    throw Error(ErrorCode::ClusterAmbiguity, "generalized eigenspaces do not span the space");
  }
  return blocks;
}

// ---------------------------------------------------------------------------
// Grassmannians

std::vector<GrassmannSignature> admissible_signatures(const InnerProductSpace& space) {
  const auto [p, q] = space.signature();
  const int m = p + q;
  std::vector<GrassmannSignature> out;
  for (int r = 0; r <= p; ++r) {
    for (int s = 0; s <= q; ++s) {
      if (r + s >= 1 && r + s <= m - 1) out.push_back({r, s});
    }
  }
  return out;
}

Subspace grassmann_sample(const InnerProductSpace& space, GrassmannSignature sig,
                          std::uint64_t seed, const SamplerOptions& opts) {
  const auto [p, q] = space.signature();
  if (sig.r < 0 || sig.s < 0 || sig.r > p || sig.s > q || sig.dim() < 1 ||
      sig.dim() > space.dim() - 1) {
    throw Error(ErrorCode::BadParameter, "signature (" + std::to_string(sig.r) + "," +
                                             std::to_string(sig.s) + ") is not admissible");
  }
  const int m = space.dim();
  const Matrix& g = space.gram();
  const double gscale = g.cwiseAbs().maxCoeff();

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  Matrix raw(m, sig.dim());
  std::vector<Vector> ortho;
  std::vector<double> ortho_norm;
  int need_neg = sig.r;
  int need_pos = sig.s;
  int draws = 0;
  while (need_neg + need_pos > 0) {
    if (draws++ >= opts.max_draws) {
      throw Error(ErrorCode::SamplerExhausted,
                  "no admissible plane after " + std::to_string(opts.max_draws) + " draws");
    }
    Vector v(m);
    for (int i = 0; i < m; ++i) v(i) = normal(rng);
    Vector w = v;
    for (std::size_t a = 0; a < ortho.size(); ++a) {
      w -= (space.inner(w, ortho[a]) / ortho_norm[a]) * ortho[a];
    }
    const double nn = space.inner(w, w);
    if (std::abs(nn) < opts.pivot_tol * w.squaredNorm() * gscale) continue;
    if (nn < 0 && need_neg > 0) {
      --need_neg;
    } else if (nn > 0 && need_pos > 0) {
      --need_pos;
    } else {
      continue;
    }
    raw.col(static_cast<Eigen::Index>(ortho.size())) = v;
    ortho.push_back(w);
    ortho_norm.push_back(nn);
  }
  return Subspace(space, raw);
}

// ---------------------------------------------------------------------------

Matrix orthonormal_span(const Matrix& m, double tol) {
  if (m.cols() == 0) return Matrix(m.rows(), 0);
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  int rank = 0;
  if (sv.size() > 0 && sv(0) > 0.0) {
    for (int i = 0; i < sv.size(); ++i) {
      if (sv(i) > tol * sv(0)) ++rank;
    }
  }
  return svd.matrixU().leftCols(rank);
}

double projector_distance(const Matrix& a, const Matrix& b) {
  const Matrix qa = orthonormal_span(a);
  const Matrix qb = orthonormal_span(b);
  return (qa * qa.transpose() - qb * qb.transpose()).norm();
}

}  // namespace pvm
