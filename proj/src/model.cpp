#include "pvm/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pvm {

double Tensor4::max_abs() const {
  double r = 0.0;
  for (double x : d_) r = std::max(r, std::abs(x));
  return r;
}

double SymmetryReport::max() const { return std::max({antisymmetry, pair_symmetry, bianchi}); }

SymmetryReport validate_symmetries(const Tensor4& t) {
  const int m = t.dim();
  SymmetryReport r;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l) {
          const double a = t(i, j, k, l);
          r.antisymmetry = std::max(r.antisymmetry, std::abs(a + t(j, i, k, l)));
          r.pair_symmetry = std::max(r.pair_symmetry, std::abs(a - t(k, l, i, j)));
          r.bianchi = std::max(r.bianchi, std::abs(a + t(j, k, i, l) + t(k, i, j, l)));
        }
  return r;
}

AlgCurvTensor::AlgCurvTensor(Tensor4 t) : t_(std::move(t)) {
  const SymmetryReport r = validate_symmetries(t_);
  const double tol = 1e-12 * std::max(1.0, t_.max_abs());
  if (r.antisymmetry >= tol || r.pair_symmetry >= tol) {
    throw Error(ErrorCode::SymmetryConflict,
                "antisymmetry defect " + std::to_string(r.antisymmetry) +
                    ", pair symmetry defect " + std::to_string(r.pair_symmetry));
  }
  if (r.bianchi >= tol) {
    throw Error(ErrorCode::BianchiViolation, "cyclic sum " + std::to_string(r.bianchi));
  }
}

double AlgCurvTensor::evaluate(const Vector& x1, const Vector& x2, const Vector& x3,
                               const Vector& x4) const {
  const int m = dim();
  double s = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const double a = x1(i) * x2(j);
      if (a == 0.0) continue;
      for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l) s += a * x3(k) * x4(l) * t_(i, j, k, l);
    }
  return s;
}

AlgCurvTensor tensor_from_components(int dim, std::span<const CurvatureEntry> generators) {
  if (dim < 1) throw Error(ErrorCode::BadParameter, "dimension " + std::to_string(dim));
  Tensor4 t(dim);
  std::vector<char> set(t.data().size(), 0);
  auto slot = [&](int i, int j, int k, int l) {
    return ((static_cast<std::size_t>(i) * dim + j) * dim + k) * dim + l;
  };
  auto put = [&](int i, int j, int k, int l, double v) {
    const std::size_t s = slot(i, j, k, l);
    if (set[s] && std::abs(t.data()[s] - v) > 1e-12 * (1.0 + std::abs(v))) {
      throw Error(ErrorCode::SymmetryConflict,
                  "slot (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + "," +
                      std::to_string(k + 1) + "," + std::to_string(l + 1) + ") gets " +
                      std::to_string(t.data()[s]) + " and " + std::to_string(v));
    }
    set[s] = 1;
    t.data()[s] = v;
  };
  for (const auto& g : generators) {
    for (int idx : {g.i, g.j, g.k, g.l}) {
      if (idx < 0 || idx >= dim) {
        throw Error(ErrorCode::DimensionMismatch,
                    "index " + std::to_string(idx + 1) + " out of range 1.." + std::to_string(dim));
      }
    }
    const auto [i, j, k, l, v] = g;
    put(i, j, k, l, v);
    put(j, i, k, l, -v);
    put(i, j, l, k, -v);
    put(j, i, l, k, v);
    put(k, l, i, j, v);
    put(l, k, i, j, -v);
    put(k, l, j, i, -v);
    put(l, k, j, i, v);
  }
  return AlgCurvTensor(std::move(t));
}

Tensor4 curvature_projection(const Tensor4& t) {
  const int m = t.dim();
  Tensor4 s(m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l) {
          s(i, j, k, l) = 0.125 * (t(i, j, k, l) - t(j, i, k, l) - t(i, j, l, k) + t(j, i, l, k) +
                                   t(k, l, i, j) - t(l, k, i, j) - t(k, l, j, i) + t(l, k, j, i));
        }
  Tensor4 a(m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l) {
          const double cyclic = s(i, j, k, l) + s(j, k, i, l) + s(k, i, j, l);
          a(i, j, k, l) = s(i, j, k, l) - cyclic / 3.0;
        }
  return a;
}

Tensor4 pullback(const Tensor4& t, const Matrix& p) {
  const int m = t.dim();
  if (p.rows() != m) {
    throw Error(ErrorCode::DimensionMismatch, "change of basis has " +
                                                  std::to_string(p.rows()) + " rows, expected " +
                                                  std::to_string(m));
  }
  const int k = static_cast<int>(p.cols());
  // Contract one slot at a time: m^4 k + m^3 k^2 + ... operations.
  std::vector<double> a(t.data().begin(), t.data().end());
  std::vector<int> dims{m, m, m, m};
  for (int mode = 0; mode < 4; ++mode) {
    std::vector<int> nd = dims;
    nd[mode] = k;
    std::vector<double> b(static_cast<std::size_t>(nd[0]) * nd[1] * nd[2] * nd[3], 0.0);
    int stride_old = 1, stride_new = 1;
    for (int d = 3; d > mode; --d) {
      stride_old *= dims[d];
      stride_new *= nd[d];
    }
    int outer = 1;
    for (int d = 0; d < mode; ++d) outer *= dims[d];
    for (int o = 0; o < outer; ++o)
      for (int c = 0; c < k; ++c)
        for (int r = 0; r < m; ++r) {
          const double w = p(r, c);
          if (w == 0.0) continue;
          const double* src = &a[(static_cast<std::size_t>(o) * m + r) * stride_old];
          double* dst = &b[(static_cast<std::size_t>(o) * k + c) * stride_new];
          for (int in = 0; in < stride_old; ++in) dst[in] += w * src[in];
        }
    a = std::move(b);
    dims = nd;
  }
  Tensor4 out(k);
  std::copy(a.begin(), a.end(), out.data().begin());
  return out;
}

// ---------------------------------------------------------------------------

Model0::Model0(InnerProductSpace space, AlgCurvTensor tensor)
    : space_(std::move(space)), tensor_(std::move(tensor)) {
  if (space_.dim() != tensor_.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "space of dimension " +
                                                  std::to_string(space_.dim()) + ", tensor of " +
                                                  std::to_string(tensor_.dim()));
  }
}

Model0 constant_curvature_model(const InnerProductSpace& space, double c) {
  const int m = space.dim();
  const Matrix& g = space.gram();
  Tensor4 t(m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l) t(i, j, k, l) = c * (g(i, l) * g(j, k) - g(i, k) * g(j, l));
  return Model0(space, AlgCurvTensor(std::move(t)));
}

Model0 direct_sum(const Model0& a, const Model0& b) {
  const int ma = a.dim();
  const int mb = b.dim();
  const int m = ma + mb;
  Matrix g = Matrix::Zero(m, m);
  g.topLeftCorner(ma, ma) = a.space().gram();
  g.bottomRightCorner(mb, mb) = b.space().gram();
  const Signature sa = a.space().signature();
  const Signature sb = b.space().signature();
  Tensor4 t(m);
  for (int i = 0; i < ma; ++i)
    for (int j = 0; j < ma; ++j)
      for (int k = 0; k < ma; ++k)
        for (int l = 0; l < ma; ++l) t(i, j, k, l) = a.tensor()(i, j, k, l);
  for (int i = 0; i < mb; ++i)
    for (int j = 0; j < mb; ++j)
      for (int k = 0; k < mb; ++k)
        for (int l = 0; l < mb; ++l) t(ma + i, ma + j, ma + k, ma + l) = b.tensor()(i, j, k, l);
  return Model0(make_space(sa.p + sb.p, sa.q + sb.q, g), AlgCurvTensor(std::move(t)));
}

Model0 change_basis(const Model0& m, const Matrix& p) {
  if (p.rows() != m.dim() || p.cols() != m.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "change of basis must be square");
  }
  return restrict_model(m, p);
}

Model0 restrict_model(const Model0& m, const Matrix& basis) {
  const Subspace sub(m.space(), basis);
  const auto [r, s] = sub.signature();
  Matrix xi = sub.induced_gram();
  return Model0(make_space(r, s, xi), AlgCurvTensor(pullback(m.tensor().raw(), basis)));
}

// ---------------------------------------------------------------------------

Matrix contract_middle(const AlgCurvTensor& a, const Matrix& s) {
  const int m = a.dim();
  if (s.rows() != m || s.cols() != m) {
    throw Error(ErrorCode::DimensionMismatch, "contraction weight has wrong shape");
  }
  Matrix out = Matrix::Zero(m, m);
  for (int w = 0; w < m; ++w)
    for (int b = 0; b < m; ++b)
      for (int c = 0; c < m; ++c) {
        const double sbc = s(b, c);
        if (sbc == 0.0) continue;
        for (int u = 0; u < m; ++u) out(w, u) += a(w, b, c, u) * sbc;
      }
  return out;
}

namespace {

void require_vector(const Model0& m, const Vector& v) {
  if (v.size() != m.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "vector of size " + std::to_string(v.size()) +
                                                  " in a " + std::to_string(m.dim()) +
                                                  "-dim model");
  }
}

// The operator M with <M x, y> = form(x, y): G M = form^T.
LinearOperator raise_index(const Model0& m, const Matrix& form) {
  return LinearOperator(m.space().gram_inverse() * form.transpose());
}

}  // namespace

LinearOperator curvature_operator(const Model0& m, const Vector& v1, const Vector& v2) {
  require_vector(m, v1);
  require_vector(m, v2);
  const int n = m.dim();
  Matrix form = Matrix::Zero(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const double w = v1(a) * v2(b);
      if (w == 0.0) continue;
      for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) form(x, y) += w * m.tensor()(a, b, x, y);
    }
  return raise_index(m, form);
}

LinearOperator jacobi(const Model0& m, const Vector& v) {
  require_vector(m, v);
  return raise_index(m, contract_middle(m.tensor(), v * v.transpose()));
}

LinearOperator jacobi_polarized(const Model0& m, const Vector& v1, const Vector& v2) {
  require_vector(m, v1);
  require_vector(m, v2);
  // Symmetric weight v1 (x) v2: identical to the polarization identity, and
  // exact on the diagonal v1 = v2.
  const Matrix s = 0.5 * (v1 * v2.transpose() + v2 * v1.transpose());
  return raise_index(m, contract_middle(m.tensor(), s));
}

LinearOperator higher_jacobi(const Model0& m, const Subspace& pi) {
  if (pi.ambient_dim() != m.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "subspace lives in another space");
  }
  return raise_index(m, contract_middle(m.tensor(), pi.dual_pairing()));
}

LinearOperator ricci(const Model0& m) {
  return raise_index(m, contract_middle(m.tensor(), m.space().gram_inverse()));
}

double scalar_curvature_of_model(const Model0& m) { return ricci(m).matrix().trace(); }

std::optional<Matrix> curvature_range(const Model0& m, double tol) {
  const int n = m.dim();
  const Matrix& ginv = m.space().gram_inverse();
  // Column (i,j,k) holds A(e_i,e_j)e_k = G^{-1} (A(i,j,k,.))^T.
  Matrix cols(n, n * n * n);
  int c = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        Vector lowered(n);
        for (int l = 0; l < n; ++l) lowered(l) = m.tensor()(i, j, k, l);
        cols.col(c++) = ginv * lowered;
      }
  if (cols.cwiseAbs().maxCoeff() == 0.0) return std::nullopt;
  Matrix span = orthonormal_span(cols, tol);
  if (span.cols() == 0) return std::nullopt;
  return span;
}

}  // namespace pvm
