#pragma once

// Puffini-Videv checks and the Ricci-eigenspace block decomposition of a
// 0-model.
//
// A model is Puffini-Videv when J(pi) and J(pi^perp) commute for every
// nondegenerate pi, equivalently when [rho, J(pi)] = 0 for every pi. When
// that holds the model splits orthogonally along the generalized
// eigenspaces of rho; in Riemannian signature every summand is Einstein,
// in general signature every summand is pseudo-Einstein.

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pvm/model.hpp"

namespace pvm {

struct PVReport {
  bool verdict = true;
  /// 3: deterministic basis-pair check of [rho, J(e_i,e_j)].
  /// 1: sampled check of [J(pi), J(pi^perp)] over one Grassmannian.
  int criterion = 3;
  /// Largest commutator norm divided by its scale; verdict is
  /// max_commutator_norm < tolerance.
  double max_commutator_norm = 0.0;
  /// The same maximum before scaling.
  double raw_max_norm = 0.0;
  double tolerance = 0.0;

  // criterion 3
  std::optional<std::array<int, 2>> witness_pair;  // 0-based basis indices
  // criterion 1
  std::optional<GrassmannSignature> signature;
  int samples = 0;
  bool zero_samples = false;
  std::optional<Matrix> witness_plane;
};

/// Deterministic finite criterion: the verdict is true iff
/// max_{i<=j} |[rho, J(e_i,e_j)]|_F < tol (1 + |rho|_F |A|_inf).
PVReport is_puffini_videv(const Model0& m, double tol = 1e-8);

/// Samples n planes of signature `sig` and checks that J(pi) and J(pi^perp)
/// commute; each commutator is scaled by 1 + |J(pi)|_F |J(pi^perp)|_F.
PVReport check_commuting_on_grassmannian(const Model0& m, GrassmannSignature sig, int n_samples,
                                         std::uint64_t seed, double tol = 1e-6,
                                         const SamplerOptions& sampler = {});

struct Einstein {
  double lambda;
};
struct PseudoEinstein {
  std::complex<double> lambda;  // the member of a conjugate pair with Im > 0
  bool complex_pair = false;
};
struct Neither {
  std::complex<double> first;  // two distinct eigenvalue clusters of rho
  std::complex<double> second;
};
using Classification = std::variant<Einstein, PseudoEinstein, Neither>;

std::string describe(const Classification& c);

struct PvTolerances {
  /// Commutator and cross-term tolerance (relative).
  double tol = 1e-8;
  /// Eigenvalue clustering of rho. Looser than `tol` because a defective
  /// eigenvalue of multiplicity k is only resolved to ~eps^(1/k).
  double cluster_tol = 1e-6;
};

/// Classifies an operator by its eigenstructure alone.
Classification classify_ricci(const LinearOperator& rho, const PvTolerances& tol = {});

/// Einstein if rho = (tau/m) I, pseudo-Einstein if rho has one real
/// eigenvalue or one conjugate pair, Neither otherwise.
Classification classify_block(const Model0& m, const PvTolerances& tol = {});

struct Block {
  Subspace subspace;
  std::complex<double> eigenvalue;
  bool complex_pair = false;
  Classification classification;
};

/// An entry of A spanning at least two blocks.
struct CrossTermWitness {
  std::array<int, 4> indices;  // columns of BlockDecomposition::combined_basis()
  std::array<int, 4> blocks;
  double value = 0.0;
};

struct BlockDecomposition {
  std::vector<Block> blocks;
  double cross_term_max = 0.0;
  std::optional<CrossTermWitness> witness;
  /// Threshold the cross terms were compared against.
  double threshold = 0.0;

  bool valid() const { return cross_term_max < threshold; }
  /// Block bases side by side, each column Euclidean-normalized.
  Matrix combined_basis() const;
  /// Block index of each combined-basis column.
  std::vector<int> block_of_column() const;
};

/// Splits V into the generalized eigenspaces of rho and measures the cross
/// terms of A between them, without requiring them to vanish.
BlockDecomposition ricci_block_split(const Model0& m, const PvTolerances& tol = {});

class NotDecomposableError : public Error {
 public:
  NotDecomposableError(const std::string& what, BlockDecomposition split, PVReport pv)
      : Error(ErrorCode::NotDecomposable, what), split_(std::move(split)), pv_(std::move(pv)) {}

  const BlockDecomposition& split() const { return split_; }
  const CrossTermWitness& witness() const { return *split_.witness; }
  const PVReport& pv_report() const { return pv_; }

 private:
  BlockDecomposition split_;
  PVReport pv_;
};

/// Ricci-eigenspace decomposition with every block classified. Throws
/// NotDecomposableError when cross terms survive.
BlockDecomposition decompose_pv(const Model0& m, const PvTolerances& tol = {});

struct VanishingReport {
  /// max |A(x1,x2,x3,x4) + A(x1,x3,x2,x4)| over block-basis tuples with
  /// x1, x4 in different blocks.
  double antisym_max = 0.0;
  std::optional<std::array<int, 4>> antisym_witness;
  /// max |A(x1,x2,x3,x4)| with x1, x4 and x2, x4 in different blocks.
  double vanishing_max = 0.0;
  std::optional<std::array<int, 4>> vanishing_witness;
  std::size_t antisym_tuples = 0;
  std::size_t vanishing_tuples = 0;
  double threshold = 0.0;

  bool passes() const { return antisym_max < threshold && vanishing_max < threshold; }
};

/// Diagnostics for the two vanishing identities a Puffini-Videv model must
/// satisfy across distinct Ricci eigenspaces.
VanishingReport cross_block_vanishing_check(const Model0& m,
                                            const BlockDecomposition& decomposition,
                                            double tol = 1e-8);

}  // namespace pvm
