#include "pvm/pv.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pvm {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::string format_complex(std::complex<double> z) {
  std::ostringstream os;
  os.precision(10);
  os << z.real();
  if (z.imag() != 0.0) os << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag()) << "i";
  return os.str();
}

}  // namespace

PVReport is_puffini_videv(const Model0& m, double tol) {
  const int n = m.dim();
  const LinearOperator rho = ricci(m);
  const double scale = 1.0 + rho.norm() * m.tensor().max_abs();
  PVReport r;
  r.criterion = 3;
  r.tolerance = tol;
  Vector ei = Vector::Zero(n);
  Vector ej = Vector::Zero(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      ei.setZero();
      ej.setZero();
      ei(i) = 1.0;
      ej(j) = 1.0;
      const double c = commutator(rho, jacobi_polarized(m, ei, ej)).norm();
      if (!r.witness_pair || c > r.raw_max_norm) {
        r.raw_max_norm = c;
        r.witness_pair = std::array<int, 2>{i, j};
      }
    }
  }
  r.max_commutator_norm = r.raw_max_norm / scale;
  r.verdict = r.max_commutator_norm < tol;
  return r;
}

PVReport check_commuting_on_grassmannian(const Model0& m, GrassmannSignature sig, int n_samples,
                                         std::uint64_t seed, double tol,
                                         const SamplerOptions& sampler) {
  PVReport r;
  r.criterion = 1;
  r.tolerance = tol;
  r.signature = sig;
  r.samples = std::max(n_samples, 0);
  r.zero_samples = n_samples <= 0;
  for (int s = 0; s < n_samples; ++s) {
    const Subspace pi =
        grassmann_sample(m.space(), sig, splitmix64(seed ^ (0x5bd1e995ULL * (s + 1))), sampler);
    const Subspace perp = orthogonal_complement(pi);
    const LinearOperator jp = higher_jacobi(m, pi);
    const LinearOperator jq = higher_jacobi(m, perp);
    const double raw = (jp * jq - jq * jp).norm();
    const double scaled = raw / (1.0 + jp.norm() * jq.norm());
    if (!r.witness_plane || scaled > r.max_commutator_norm) {
      r.max_commutator_norm = scaled;
      r.raw_max_norm = raw;
      r.witness_plane = pi.basis();
    }
  }
  r.verdict = r.max_commutator_norm < tol;
  return r;
}

// ---------------------------------------------------------------------------

std::string describe(const Classification& c) {
  struct {
    std::string operator()(const Einstein& e) const {
      return "Einstein(" + format_complex(e.lambda) + ")";
    }
    std::string operator()(const PseudoEinstein& p) const {
      if (p.complex_pair) {
        return "PseudoEinstein(" + format_complex(p.lambda) + ", " +
               format_complex(std::conj(p.lambda)) + ")";
      }
      return "PseudoEinstein(" + format_complex(p.lambda) + ")";
    }
    std::string operator()(const Neither& n) const {
      return "Neither(" + format_complex(n.first) + " | " + format_complex(n.second) + ")";
    }
  } visitor;
  return std::visit(visitor, c);
}

Classification classify_ricci(const LinearOperator& rho, const PvTolerances& tol) {
  const int n = rho.dim();
  const double lambda = rho.matrix().trace() / n;
  const double defect = (rho.matrix() - lambda * Matrix::Identity(n, n)).norm();
  if (defect < tol.tol * (1.0 + rho.norm())) return Einstein{lambda};

  const auto blocks = real_generalized_eigenspaces(rho, tol.cluster_tol);
  if (blocks.size() == 1) return PseudoEinstein{blocks.front().value, blocks.front().complex_pair};
  return Neither{blocks[0].value, blocks[1].value};
}

Classification classify_block(const Model0& m, const PvTolerances& tol) {
  return classify_ricci(ricci(m), tol);
}

// ---------------------------------------------------------------------------

Matrix BlockDecomposition::combined_basis() const {
  int cols = 0;
  int rows = 0;
  for (const auto& b : blocks) {
    cols += b.subspace.dim();
    rows = b.subspace.ambient_dim();
  }
  Matrix p(rows, cols);
  int c = 0;
  for (const auto& b : blocks) {
    p.middleCols(c, b.subspace.dim()) = b.subspace.basis();
    c += b.subspace.dim();
  }
  return p;
}

std::vector<int> BlockDecomposition::block_of_column() const {
  std::vector<int> out;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    out.insert(out.end(), blocks[b].subspace.dim(), static_cast<int>(b));
  }
  return out;
}

BlockDecomposition ricci_block_split(const Model0& m, const PvTolerances& tol) {
  const LinearOperator rho = ricci(m);
  const auto eig = real_generalized_eigenspaces(rho, tol.cluster_tol);

  BlockDecomposition d;
  for (const auto& e : eig) {
    Matrix basis = e.basis;
    // Fix the sign of each column: largest-magnitude component positive.
    for (int c = 0; c < basis.cols(); ++c) {
      Eigen::Index arg = 0;
      basis.col(c).cwiseAbs().maxCoeff(&arg);
      if (basis(arg, c) < 0) basis.col(c) *= -1.0;
    }
    d.blocks.push_back(Block{Subspace(m.space(), basis), e.value, e.complex_pair,
                             Neither{e.value, e.value}});
  }

  const Matrix p = d.combined_basis();
  const std::vector<int> owner = d.block_of_column();
  const Tensor4 a = pullback(m.tensor().raw(), p);
  const int n = a.dim();
  d.threshold = tol.tol * (1.0 + m.tensor().max_abs());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          const int bi = owner[i];
          if (owner[j] == bi && owner[k] == bi && owner[l] == bi) continue;
          const double v = a(i, j, k, l);
          if (!d.witness || std::abs(v) > d.cross_term_max) {
            d.cross_term_max = std::abs(v);
            d.witness = CrossTermWitness{{i, j, k, l}, {bi, owner[j], owner[k], owner[l]}, v};
          }
        }

  for (auto& b : d.blocks) {
    b.classification = classify_block(restrict_model(m, b.subspace.basis()), tol);
  }
  return d;
}

BlockDecomposition decompose_pv(const Model0& m, const PvTolerances& tol) {
  BlockDecomposition d = ricci_block_split(m, tol);
  if (d.valid()) return d;

  PVReport pv = is_puffini_videv(m, tol.tol);
  const CrossTermWitness& w = *d.witness;
  std::ostringstream os;
  os.precision(10);
  os << "cross-block curvature entry " << w.value << " at block-basis indices (" << w.indices[0] + 1
     << "," << w.indices[1] + 1 << "," << w.indices[2] + 1 << "," << w.indices[3] + 1
     << ") coupling eigenvalue clusters";
  std::vector<int> seen;
  for (int b : w.blocks) {
    if (std::find(seen.begin(), seen.end(), b) != seen.end()) continue;
    seen.push_back(b);
    os << " " << format_complex(d.blocks[b].eigenvalue);
  }
  os << "; exceeds threshold " << d.threshold << "; basis-pair commutator check reports "
     << (pv.verdict ? "Puffini-Videv (numerical disagreement)" : "not Puffini-Videv")
     << " with scaled norm " << pv.max_commutator_norm;
  throw NotDecomposableError(os.str(), std::move(d), std::move(pv));
}

VanishingReport cross_block_vanishing_check(const Model0& m,
                                            const BlockDecomposition& decomposition, double tol) {
  const Matrix p = decomposition.combined_basis();
  if (p.rows() != m.dim() || p.cols() != m.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "decomposition blocks do not span the space");
  }
  const std::vector<int> owner = decomposition.block_of_column();
  const Tensor4 a = pullback(m.tensor().raw(), p);
  const int n = a.dim();
  VanishingReport r;
  r.threshold = tol * (1.0 + m.tensor().max_abs());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          if (owner[i] == owner[l]) continue;
          ++r.antisym_tuples;
          const double s = std::abs(a(i, j, k, l) + a(i, k, j, l));
          if (s > r.antisym_max) {
            r.antisym_max = s;
            r.antisym_witness = std::array<int, 4>{i, j, k, l};
          }
          if (owner[j] == owner[l]) continue;
          ++r.vanishing_tuples;
          const double v = std::abs(a(i, j, k, l));
          if (v > r.vanishing_max) {
            r.vanishing_max = v;
            r.vanishing_witness = std::array<int, 4>{i, j, k, l};
          }
        }
  return r;
}

}  // namespace pvm
