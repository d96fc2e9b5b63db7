#include <gtest/gtest.h>

#include <cmath>

#include "pvm/expr.hpp"
#include "support.hpp"

using namespace pvm;
using namespace pvm::testing;

namespace {

Vector pt(std::initializer_list<double> v) {
  Vector x(v.size());
  int i = 0;
  for (double d : v) x(i++) = d;
  return x;
}

double at(const std::string& text, std::initializer_list<double> x) {
  return eval(parse(text, static_cast<int>(x.size())), pt(x));
}

}  // namespace

TEST(Parse, TreeShape) {
  const Expr e = parse("x1*(x1 + 2*x2)", 4);
  ASSERT_EQ(e.kind(), ExprKind::Mul);
  EXPECT_EQ(e.lhs().kind(), ExprKind::Variable);
  EXPECT_EQ(e.lhs().variable(), 0);
  ASSERT_EQ(e.rhs().kind(), ExprKind::Add);
  EXPECT_EQ(e.rhs().rhs().kind(), ExprKind::Mul);
  EXPECT_EQ(e.max_variable(), 1);
}

TEST(Parse, Values) {
  EXPECT_EQ(at("x1^2", {3}), 9.0);
  EXPECT_EQ(at("-x1^2", {3}), -9.0);
  EXPECT_EQ(at("(-x1)^2", {3}), 9.0);
  EXPECT_EQ(at("2^3^2", {0}), 512.0);
  EXPECT_EQ(at("x1^-1", {4}), 0.25);
  EXPECT_EQ(at("8/4/2", {0}), 1.0);
  EXPECT_EQ(at("x1 - x2 - x3", {1, 2, 3}), -4.0);
  EXPECT_EQ(at("  1+2 *3 ", {0}), 7.0);
  EXPECT_EQ(at("--x1", {5}), 5.0);
  EXPECT_DOUBLE_EQ(at("exp(ln(x1)) + sin(0)*cos(x1) + sinh(0) + cosh(0)", {2.5}), 3.5);
  EXPECT_EQ(at("1.5e1 + .5", {0}), 15.5);
}

TEST(Parse, Errors) {
  try {
    parse("exp(2*x1", 4);
    FAIL();
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.offset(), 8u);
    EXPECT_EQ(e.code(), ErrorCode::SyntaxError);
  }
  try {
    parse("x1 + * x2", 2);
    FAIL();
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.offset(), 5u);
  }
  EXPECT_THROW(parse("", 1), SyntaxError);
  EXPECT_THROW(parse("x1 x2", 2), SyntaxError);
  EXPECT_THROW(parse("x1^x2", 2), SyntaxError);  // exponent must be a literal

  auto code = [](const char* text, int n) {
    try {
      parse(text, n);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::BadParameter;
  };
  EXPECT_EQ(code("x5", 4), ErrorCode::VariableOutOfRange);
  EXPECT_EQ(code("x0", 4), ErrorCode::VariableOutOfRange);
  EXPECT_EQ(code("tan(x1)", 4), ErrorCode::UnknownIdentifier);
  EXPECT_EQ(code("y", 4), ErrorCode::UnknownIdentifier);
}

TEST(Print, RoundTrip) {
  for (const char* text : {"x1*(x1 + 2*x2)", "-x1^2", "(-x1)^2", "2^3^2", "x1^-1.5",
                           "ln(4/(1+x1^2+x2^2))", "-(-3)", "x1 - (x2 - x3)", "1e-300*x1",
                           "0.1 + 0.2"}) {
    const Expr e = parse(text, 3);
    const Expr back = parse(e.to_string(), 3);
    EXPECT_TRUE(e == back) << text << " -> " << e.to_string();
  }
  Rng rng(17);
  for (int i = 0; i < 200; ++i) {
    const Expr e = random_expr(rng, 4, 3);
    const Expr back = parse(e.to_string(), 3);
    ASSERT_TRUE(e == back) << e.to_string();
  }
}

TEST(Structural, Equality) {
  EXPECT_TRUE(parse("x1+x2", 2) == parse("(x1)+(x2)", 2));
  EXPECT_FALSE(parse("x1+x2", 2) == parse("x2+x1", 2));
}

TEST(RemapVariables, Shifts) {
  const int map[] = {2, 3};
  const Expr e = remap_variables(parse("x1*x2", 2), map);
  EXPECT_EQ(e.max_variable(), 3);
  EXPECT_EQ(eval(e, pt({0, 0, 3, 5})), 15.0);
}

TEST(EvalJet2, Examples) {
  const Jet2 j = eval_jet2(parse("x1*x2", 2), pt({3, 5}));
  EXPECT_EQ(j.value, 15.0);
  EXPECT_EQ(j.grad, pt({5, 3}));
  Matrix h(2, 2);
  h << 0, 1, 1, 0;
  EXPECT_EQ(j.hess, h);

  const Jet2 c = eval_jet2(parse("7", 2), pt({1, 2}));
  EXPECT_EQ(c.value, 7.0);
  EXPECT_EQ(c.grad.norm(), 0.0);
  EXPECT_EQ(c.hess.norm(), 0.0);

  const Jet2 l = eval_jet2(parse("ln(x1)", 1), pt({2}));
  EXPECT_DOUBLE_EQ(l.value, std::log(2.0));
  EXPECT_DOUBLE_EQ(l.grad(0), 0.5);
  EXPECT_DOUBLE_EQ(l.hess(0, 0), -0.25);
}

TEST(EvalJet2, DomainErrors) {
  auto code = [](const char* text, double x) {
    try {
      eval_jet2(parse(text, 1), pt({x}));
    } catch (const Error& e) {
      EXPECT_NE(std::string(e.what()).find(" in "), std::string::npos);
      return e.code();
    }
    return ErrorCode::BadParameter;
  };
  EXPECT_EQ(code("ln(x1)", -1), ErrorCode::DomainError);
  EXPECT_EQ(code("ln(x1)", 0), ErrorCode::DomainError);
  EXPECT_EQ(code("1/x1", 0), ErrorCode::DomainError);
  EXPECT_EQ(code("x1^0.5", -1), ErrorCode::DomainError);
  EXPECT_EQ(code("x1^-2", 0), ErrorCode::DomainError);
  EXPECT_EQ(code("exp(x1)", 1000), ErrorCode::DomainError);
  EXPECT_EQ(eval(parse("x1^3", 1), pt({-2})), -8.0);  // integer powers of negatives are fine
}

TEST(EvalJet2, HessianExactlySymmetric) {
  Rng rng(23);
  for (int i = 0; i < 50; ++i) {
    const Expr e = random_expr(rng, 4, 3);
    const Jet2 j = eval_jet2(e, random_vector(3, rng).cwiseMin(1.0).cwiseMax(-1.0));
    EXPECT_EQ(j.hess, j.hess.transpose());
  }
}

TEST(EvalJet2, MatchesFiniteDifferences) {
  Rng rng(29);
  constexpr double kStep = 1e-5;
  constexpr double kHessStep = 1e-4;
  for (int i = 0; i < 100; ++i) {
    const Expr e = random_expr(rng, 3, 3);
    Vector x(3);
    for (int k = 0; k < 3; ++k) x(k) = std::uniform_real_distribution<double>(-1, 1)(rng);
    const Jet2 j = eval_jet2(e, x);
    const Vector g = fd_gradient(e, x, kStep);
    const Matrix h = fd_hessian(e, x, kHessStep);
    EXPECT_LT((j.grad - g).norm(), 1e-6 * std::max(1.0, j.grad.norm())) << e.to_string();
    EXPECT_LT((j.hess - h).norm(), 1e-6 * std::max(1.0, j.hess.norm())) << e.to_string();
  }
}
