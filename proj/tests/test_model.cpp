#include <gtest/gtest.h>

#include "pvm/model.hpp"
#include "support.hpp"

using namespace pvm;
using namespace pvm::testing;

namespace {

Vector e(int n, int i) {
  Vector v = Vector::Zero(n);
  v(i) = 1.0;
  return v;
}

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& err) {
    return err.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::BadParameter;
}

Model0 non_pv_model() {
  const CurvatureEntry gens[] = {{0, 1, 1, 0, 1.0}, {0, 2, 2, 0, 2.0}};
  return Model0(make_space(0, 3), tensor_from_components(3, gens));
}

}  // namespace

TEST(TensorFromComponents, SymmetryClosure) {
  const CurvatureEntry gens[] = {{0, 1, 1, 0, 1.0}};
  const AlgCurvTensor a = tensor_from_components(3, gens);
  EXPECT_EQ(a(0, 1, 1, 0), 1.0);
  EXPECT_EQ(a(1, 0, 0, 1), 1.0);
  EXPECT_EQ(a(1, 0, 1, 0), -1.0);
  EXPECT_EQ(a(0, 1, 0, 1), -1.0);
  int nonzero = 0;
  for (double v : a.raw().data()) nonzero += v != 0.0;
  EXPECT_EQ(nonzero, 4);
  EXPECT_EQ(validate_symmetries(a.raw()).max(), 0.0);
}

TEST(TensorFromComponents, EmptyIsZero) {
  const AlgCurvTensor a = tensor_from_components(3, {});
  EXPECT_EQ(a.max_abs(), 0.0);
}

TEST(TensorFromComponents, Errors) {
  const CurvatureEntry lone[] = {{0, 1, 2, 3, 1.0}};
  EXPECT_EQ(code_of([&] { tensor_from_components(4, lone); }), ErrorCode::BianchiViolation);

  const CurvatureEntry clash[] = {{0, 1, 1, 0, 1.0}, {1, 0, 0, 1, 2.0}};
  EXPECT_EQ(code_of([&] { tensor_from_components(3, clash); }), ErrorCode::SymmetryConflict);

  const CurvatureEntry diag[] = {{0, 0, 1, 1, 1.0}};  // forces A = -A
  EXPECT_EQ(code_of([&] { tensor_from_components(3, diag); }), ErrorCode::SymmetryConflict);

  const CurvatureEntry range[] = {{0, 1, 1, 3, 1.0}};
  EXPECT_EQ(code_of([&] { tensor_from_components(3, range); }), ErrorCode::DimensionMismatch);
}

TEST(ValidateSymmetries, Reports) {
  EXPECT_EQ(validate_symmetries(Tensor4(3)).max(), 0.0);
  const Model0 cc = constant_curvature_model(make_space(1, 3), 1.7);
  EXPECT_LT(validate_symmetries(cc.tensor().raw()).max(), 1e-15);

  Tensor4 t(3);
  t(0, 1, 1, 0) = 1.0;
  t(1, 0, 0, 1) = 2.0;
  const SymmetryReport r = validate_symmetries(t);
  EXPECT_EQ(r.pair_symmetry, 1.0);
  EXPECT_FALSE(r.passes());
  EXPECT_THROW(AlgCurvTensor{t}, Error);
}

TEST(CurvatureProjection, IdempotentOnCurvatureTensors) {
  Rng rng(3);
  const Tensor4 a = random_act(4, rng);
  const Tensor4 pa = curvature_projection(a);
  double diff = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    diff = std::max(diff, std::abs(a.data()[i] - pa.data()[i]));
  }
  EXPECT_LT(diff, 1e-13);

  Tensor4 junk(4);
  for (auto& v : junk.data()) v = gauss(rng);
  EXPECT_LT(validate_symmetries(curvature_projection(junk)).max(), 1e-13);
}

TEST(ConstantCurvature, Components) {
  const Model0 m = constant_curvature_model(make_space(0, 3), 1.0);
  EXPECT_EQ(m.tensor()(0, 1, 1, 0), 1.0);
  EXPECT_EQ(constant_curvature_model(make_space(0, 3), 0.0).tensor().max_abs(), 0.0);
  EXPECT_EQ(constant_curvature_model(make_space(1, 2), 1.0).tensor()(0, 1, 1, 0), -1.0);
}

TEST(DirectSum, BlocksAndSignature) {
  const Model0 s = einstein_sum({2, 2}, {1.0, 2.0});
  EXPECT_EQ(s.tensor()(0, 1, 1, 0), 1.0);
  EXPECT_EQ(s.tensor()(2, 3, 3, 2), 2.0);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l) {
          const bool first = i < 2 && j < 2 && k < 2 && l < 2;
          const bool second = i >= 2 && j >= 2 && k >= 2 && l >= 2;
          if (!first && !second) {
            EXPECT_EQ(s.tensor()(i, j, k, l), 0.0);
          }
        }

  const Model0 a = constant_curvature_model(make_space(1, 1), 1.5);
  const Model0 b = constant_curvature_model(make_space(0, 2), 0.0);
  const Model0 ab = direct_sum(a, b);
  EXPECT_EQ(ab.space().signature(), (Signature{1, 3}));
  EXPECT_LT((ricci(ab).matrix().topLeftCorner(2, 2) - ricci(a).matrix()).norm(), 1e-15);
}

TEST(CurvatureOperator, Examples) {
  Rng rng(4);
  const Model0 m = random_model(1, 3, rng);
  const Vector v = random_vector(4, rng);
  EXPECT_LT(curvature_operator(m, v, v).norm(), 1e-13);

  const Model0 cc = constant_curvature_model(make_space(0, 3), 1.0);
  EXPECT_LT((curvature_operator(cc, e(3, 0), e(3, 1)).apply(e(3, 1)) - e(3, 0)).norm(), 1e-15);

  const Vector w = random_vector(4, rng);
  EXPECT_LT((curvature_operator(m, 2.0 * v, w).matrix() -
             2.0 * curvature_operator(m, v, w).matrix()).norm(),
            1e-12);
  EXPECT_LT((curvature_operator(m, v, w) + curvature_operator(m, w, v)).norm(), 1e-12);
  EXPECT_EQ(code_of([&] { curvature_operator(m, e(3, 0), v); }), ErrorCode::DimensionMismatch);
}

TEST(Jacobi, Examples) {
  const Model0 cc = constant_curvature_model(make_space(0, 3), 1.0);
  EXPECT_LT((jacobi(cc, e(3, 0)).matrix() -
             Vector(Eigen::Vector3d(0, 1, 1)).asDiagonal().toDenseMatrix()).norm(), 1e-15);
  EXPECT_EQ(jacobi(cc, Vector::Zero(3)).norm(), 0.0);

  const Model0 lor = constant_curvature_model(make_space(1, 2), 1.0);
  EXPECT_LT((jacobi(lor, e(3, 0)).matrix() -
             Vector(Eigen::Vector3d(0, -1, -1)).asDiagonal().toDenseMatrix()).norm(), 1e-15);
}

TEST(Jacobi, MatchesOracleQuadraticSelfAdjoint) {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const int p = trial % 3;
    const int m = 3 + trial % 3;
    const Model0 model = random_model(p, m - p, rng);
    const Vector v = random_vector(m, rng);
    const Matrix j = jacobi(model, v).matrix();
    const double scale = 1.0 + j.norm();
    EXPECT_LT((j - jacobi_oracle(model, v)).norm(), 1e-10 * scale);
    EXPECT_LT((j * v).norm(), 1e-10 * scale * v.norm());

    const double lam = gauss(rng);
    EXPECT_LT((jacobi(model, lam * v).matrix() - lam * lam * j).norm(), 1e-10 * scale);

    const Vector w = random_vector(m, rng);
    const Vector u = random_vector(m, rng);
    const auto& g = model.space().gram();
    EXPECT_NEAR((j * w).dot(g * u), w.dot(g * (j * u)), 1e-10 * scale * w.norm() * u.norm());
  }
}

TEST(JacobiPolarized, Examples) {
  const Model0 cc = constant_curvature_model(make_space(0, 3), 2.0);
  EXPECT_EQ(jacobi_polarized(cc, e(3, 0), e(3, 0)).matrix(), jacobi(cc, e(3, 0)).matrix());
  Matrix expected = Matrix::Zero(3, 3);
  expected(0, 1) = expected(1, 0) = -1.0;  // -c/2
  EXPECT_LT((jacobi_polarized(cc, e(3, 0), e(3, 1)).matrix() - expected).norm(), 1e-15);

  Rng rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    const Model0 m = random_model(trial % 2, 4 - trial % 2, rng);
    const Vector a = random_vector(4, rng);
    const Vector b = random_vector(4, rng);
    const Matrix jab = jacobi_polarized(m, a, b).matrix();
    EXPECT_LT((jab - jacobi_polarized(m, b, a).matrix()).norm(), 1e-12 * (1 + jab.norm()));
    EXPECT_LT((jab - polarized_oracle(m, a, b)).norm(), 1e-10 * (1 + jab.norm()));
  }
}

TEST(HigherJacobi, Examples) {
  const Model0 cc = constant_curvature_model(make_space(0, 3), 1.0);
  Matrix b = Matrix::Zero(3, 2);
  b(0, 0) = b(1, 1) = 1.0;
  const Subspace pi(cc.space(), b);
  const Matrix expected = Vector(Eigen::Vector3d(1, 1, 2)).asDiagonal();
  EXPECT_LT((higher_jacobi(cc, pi).matrix() - expected).norm(), 1e-14);
  EXPECT_LT((higher_jacobi_oracle(cc, b) - expected).norm(), 1e-14);

  Matrix b2(3, 2);
  b2 << 1, 1, 1, -1, 0, 0;
  EXPECT_LT((higher_jacobi(cc, Subspace(cc.space(), b2)).matrix() - expected).norm(), 1e-10);

  Rng rng(21);
  const Model0 m = random_model(1, 3, rng);
  EXPECT_LT((higher_jacobi(m, full_space(m.space())).matrix() - ricci(m).matrix()).norm(),
            1e-10 * (1 + ricci(m).norm()));
}

TEST(HigherJacobi, MatchesLiteralSumAndIsBasisIndependent) {
  Rng rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    const int p = trial % 2;
    const int m = 3 + trial % 4;
    const Model0 model = random_model(p, m - p, rng);
    const int k = 1 + trial % (m - 1);
    const Subspace pi = random_plane(model.space(), k, rng);
    const Matrix j = higher_jacobi(model, pi).matrix();
    const double scale = 1.0 + j.norm();
    EXPECT_LT((j - higher_jacobi_oracle(model, pi.basis())).norm(), 1e-9 * scale);
    const Matrix q = random_invertible(k, rng);
    const Subspace pi2(model.space(), pi.basis() * q);
    EXPECT_LT((higher_jacobi(model, pi2).matrix() - j).norm(), 1e-9 * scale);
  }
}

TEST(HigherJacobi, RicciSplitsOverComplement) {
  Rng rng(41);
  for (int trial = 0; trial < 30; ++trial) {
    const int p = trial % 2;
    const int m = 3 + trial % 4;
    const Model0 model = random_model(p, m - p, rng);
    const Subspace pi = random_plane(model.space(), 1 + trial % (m - 1), rng);
    const Subspace perp = orthogonal_complement(pi);
    const LinearOperator rho = ricci(model);
    const LinearOperator jp = higher_jacobi(model, pi);
    const LinearOperator jq = higher_jacobi(model, perp);
    const double scale = 1.0 + rho.norm();
    EXPECT_LT((rho - jp - jq).norm(), 1e-9 * scale);
    // [rho, J(pi)] = [J(pi_perp), J(pi)].
    EXPECT_LT((commutator(rho, jp) - commutator(jq, jp)).norm(), 1e-9 * scale * scale);
  }
}

TEST(Ricci, Examples) {
  for (int m = 2; m <= 5; ++m) {
    const Model0 cc = constant_curvature_model(make_space(0, m), 0.7);
    EXPECT_LT((ricci(cc).matrix() - 0.7 * (m - 1) * Matrix::Identity(m, m)).norm(), 1e-14);
    EXPECT_NEAR(scalar_curvature_of_model(cc), 0.7 * m * (m - 1), 1e-13);
  }
  EXPECT_EQ(ricci(Model0(make_space(0, 3), AlgCurvTensor::zero(3))).norm(), 0.0);
  EXPECT_EQ(scalar_curvature_of_model(Model0(make_space(0, 3), AlgCurvTensor::zero(3))), 0.0);

  const Model0 np = non_pv_model();
  EXPECT_LT((ricci(np).matrix() - Vector(Eigen::Vector3d(3, 1, 2)).asDiagonal().toDenseMatrix())
                .norm(),
            1e-15);
  EXPECT_NEAR(scalar_curvature_of_model(np), 6.0, 1e-15);
}

TEST(Ricci, SelfAdjointAndMatchesOracle) {
  Rng rng(51);
  for (int trial = 0; trial < 20; ++trial) {
    const Model0 m = random_model(trial % 3, 4, rng);
    const Matrix rho = ricci(m).matrix();
    const Matrix& g = m.space().gram();
    EXPECT_LT((g * rho - (g * rho).transpose()).norm(), 1e-10 * (1 + rho.norm()));
    EXPECT_LT((rho - ricci_oracle(m)).norm(), 1e-9 * (1 + rho.norm()));
  }
}

TEST(ChangeBasis, ScalarCurvatureInvariant) {
  Rng rng(61);
  for (int trial = 0; trial < 10; ++trial) {
    const Model0 m = random_model(1, 3, rng);
    const Model0 mp = change_basis(m, random_invertible(4, rng));
    EXPECT_EQ(mp.space().signature(), (Signature{1, 3}));
    EXPECT_NEAR(scalar_curvature_of_model(mp), scalar_curvature_of_model(m),
                1e-9 * (1 + std::abs(scalar_curvature_of_model(m))));
  }
}

TEST(CurvatureRange, Examples) {
  const Model0 cc = constant_curvature_model(make_space(0, 3), 2.0);
  const auto full = curvature_range(cc);
  ASSERT_TRUE(full.has_value());
  EXPECT_EQ(full->cols(), 3);

  EXPECT_FALSE(curvature_range(Model0(make_space(0, 3), AlgCurvTensor::zero(3))).has_value());

  const Model0 sum = direct_sum(constant_curvature_model(make_space(0, 2), 1.0),
                                Model0(make_space(0, 1), AlgCurvTensor::zero(1)));
  const auto r = curvature_range(sum);
  ASSERT_TRUE(r.has_value());
  Matrix expected = Matrix::Zero(3, 2);
  expected(0, 0) = expected(1, 1) = 1.0;
  EXPECT_LT(projector_distance(*r, expected), 1e-12);
}

// Rotating e1 towards e_{k+1} inside pi = span{e1..ek}: the change of J(pi)
// between the two ends of the quarter turn is J(e_{k+1}) - J(e1).
TEST(HigherJacobi, RotationFamily) {
  Rng rng(71);
  const Model0 pv = change_basis(einstein_sum({2, 3}, {1.0, -2.0}), random_orthogonal(5, rng));
  const Model0 generic(make_space(0, 5), AlgCurvTensor(random_act(5, rng)));
  for (const Model0* m : {&pv, &generic}) {
    const int n = 5;
    const int k = 2;
    const LinearOperator rho = ricci(*m);
    auto plane = [&](double theta) {
      Matrix b = Matrix::Zero(n, k);
      b.col(0) = std::cos(theta) * e(n, 0) + std::sin(theta) * e(n, k);
      for (int i = 1; i < k; ++i) b.col(i) = e(n, i);
      return higher_jacobi(*m, Subspace(m->space(), b));
    };
    const LinearOperator delta = plane(M_PI / 2) - plane(0.0);
    const LinearOperator expected = jacobi(*m, e(n, k)) - jacobi(*m, e(n, 0));
    EXPECT_LT((delta - expected).norm(), 1e-9 * (1 + rho.norm()));
    if (m == &pv) {
      for (double theta : {0.0, 0.3, 1.1, M_PI / 2}) {
        EXPECT_LT(commutator(rho, plane(theta)).norm(), 1e-9);
      }
      EXPECT_LT(commutator(rho, expected).norm(), 1e-9);
    }
  }
}
