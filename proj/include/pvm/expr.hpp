#pragma once

// Closed-form expressions in chart coordinates x1..xn, with evaluation of
// value, gradient and Hessian by second-order forward differentiation.

#include <memory>
#include <span>
#include <string>
#include <string_view>

#include "pvm/linalg.hpp"

namespace pvm {

enum class ExprKind { Number, Variable, Add, Sub, Mul, Div, Pow, Neg, Call };
enum class Func { Exp, Ln, Sin, Cos, Sinh, Cosh };

std::string_view to_string(Func f);

/// Immutable expression tree; copies share nodes.
class Expr {
 public:
  static Expr number(double v);
  /// 0-based variable index; prints as x{index+1}.
  static Expr variable(int index);
  static Expr binary(ExprKind kind, Expr lhs, Expr rhs);
  /// base ^ exponent with a literal real exponent.
  static Expr pow(Expr base, double exponent);
  static Expr neg(Expr operand);
  static Expr call(Func f, Expr arg);

  ExprKind kind() const;
  /// Literal value for Number, exponent for Pow.
  double number() const;
  int variable() const;
  Func func() const;
  /// Left operand of a binary node, operand of Pow, Neg and Call.
  const Expr& lhs() const;
  const Expr& rhs() const;

  /// Largest 0-based variable index used, or -1.
  int max_variable() const;

  /// Structural equality of the trees.
  friend bool operator==(const Expr& a, const Expr& b);

  /// Text that parses back to an identical tree.
  std::string to_string() const;

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);

/// Recursive-descent parser.
///
///   expr     := term (('+'|'-') term)*
///   term     := factor (('*'|'/') factor)*
///   factor   := '-' factor | power
///   power    := atom ('^' exponent)?
///   exponent := ('+'|'-')? number ('^' exponent)?
///   atom     := number | x<k> | func '(' expr ')' | '(' expr ')'
///
/// so '^' binds tighter than unary minus and chains to the right.
/// Throws SyntaxError, or Error with UnknownIdentifier / VariableOutOfRange.
Expr parse(std::string_view text, int n_vars);

/// Replaces variable i by variable mapping[i].
Expr remap_variables(const Expr& e, std::span<const int> mapping);

struct Jet2 {
  double value = 0.0;
  Vector grad;
  Matrix hess;  // exactly symmetric
};

/// Value, gradient and Hessian at `point`. Throws DomainError naming the
/// offending subtree for ln of a non-positive number, division by zero,
/// non-integer powers of negative numbers, or a non-finite result.
Jet2 eval_jet2(const Expr& e, const Vector& point);

/// Value only.
double eval(const Expr& e, const Vector& point);

}  // namespace pvm
