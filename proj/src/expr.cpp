#include "pvm/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>

namespace pvm {

struct Expr::Node {
  ExprKind kind;
  double num = 0.0;
  int var = 0;
  Func func = Func::Exp;
  std::optional<Expr> a;
  std::optional<Expr> b;
};

std::string_view to_string(Func f) {
  switch (f) {
    case Func::Exp: return "exp";
    case Func::Ln: return "ln";
    case Func::Sin: return "sin";
    case Func::Cos: return "cos";
    case Func::Sinh: return "sinh";
    case Func::Cosh: return "cosh";
  }
  return "?";
}

Expr Expr::number(double v) {
  return Expr(std::make_shared<const Node>(Node{ExprKind::Number, v, 0, Func::Exp, {}, {}}));
}

Expr Expr::variable(int index) {
  if (index < 0) throw Error(ErrorCode::VariableOutOfRange, "negative variable index");
  return Expr(std::make_shared<const Node>(Node{ExprKind::Variable, 0.0, index, Func::Exp, {}, {}}));
}

Expr Expr::binary(ExprKind kind, Expr lhs, Expr rhs) {
  if (kind != ExprKind::Add && kind != ExprKind::Sub && kind != ExprKind::Mul &&
      kind != ExprKind::Div) {
    throw Error(ErrorCode::BadParameter, "not a binary operator");
  }
  return Expr(std::make_shared<const Node>(
      Node{kind, 0.0, 0, Func::Exp, std::move(lhs), std::move(rhs)}));
}

Expr Expr::pow(Expr base, double exponent) {
  return Expr(std::make_shared<const Node>(
      Node{ExprKind::Pow, exponent, 0, Func::Exp, std::move(base), {}}));
}

Expr Expr::neg(Expr operand) {
  return Expr(
      std::make_shared<const Node>(Node{ExprKind::Neg, 0.0, 0, Func::Exp, std::move(operand), {}}));
}

Expr Expr::call(Func f, Expr arg) {
  return Expr(std::make_shared<const Node>(Node{ExprKind::Call, 0.0, 0, f, std::move(arg), {}}));
}

ExprKind Expr::kind() const { return node_->kind; }
double Expr::number() const { return node_->num; }
int Expr::variable() const { return node_->var; }
Func Expr::func() const { return node_->func; }
const Expr& Expr::lhs() const { return *node_->a; }
const Expr& Expr::rhs() const { return *node_->b; }

int Expr::max_variable() const {
  switch (kind()) {
    case ExprKind::Number: return -1;
    case ExprKind::Variable: return variable();
    case ExprKind::Pow:
    case ExprKind::Neg:
    case ExprKind::Call: return lhs().max_variable();
    default: return std::max(lhs().max_variable(), rhs().max_variable());
  }
}

bool operator==(const Expr& x, const Expr& y) {
  if (x.node_ == y.node_) return true;
  if (x.kind() != y.kind()) return false;
  switch (x.kind()) {
    case ExprKind::Number: return x.number() == y.number();
    case ExprKind::Variable: return x.variable() == y.variable();
    case ExprKind::Pow: return x.number() == y.number() && x.lhs() == y.lhs();
    case ExprKind::Neg: return x.lhs() == y.lhs();
    case ExprKind::Call: return x.func() == y.func() && x.lhs() == y.lhs();
    default: return x.lhs() == y.lhs() && x.rhs() == y.rhs();
  }
}

namespace {

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string Expr::to_string() const {
  switch (kind()) {
    case ExprKind::Number: {
      const std::string s = format_number(number());
      return number() < 0 ? "(" + s + ")" : s;
    }
    case ExprKind::Variable: return "x" + std::to_string(variable() + 1);
    case ExprKind::Add: return "(" + lhs().to_string() + " + " + rhs().to_string() + ")";
    case ExprKind::Sub: return "(" + lhs().to_string() + " - " + rhs().to_string() + ")";
    case ExprKind::Mul: return "(" + lhs().to_string() + " * " + rhs().to_string() + ")";
    case ExprKind::Div: return "(" + lhs().to_string() + " / " + rhs().to_string() + ")";
    case ExprKind::Pow: {
      std::string base = lhs().to_string();
      if (lhs().kind() == ExprKind::Pow || lhs().kind() == ExprKind::Neg) base = "(" + base + ")";
      return base + "^" + format_number(number());
    }
    case ExprKind::Neg: return "-" + lhs().to_string();
    case ExprKind::Call: return std::string(pvm::to_string(func())) + "(" + lhs().to_string() + ")";
  }
  return {};
}

Expr operator+(const Expr& a, const Expr& b) { return Expr::binary(ExprKind::Add, a, b); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::binary(ExprKind::Sub, a, b); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::binary(ExprKind::Mul, a, b); }
Expr operator/(const Expr& a, const Expr& b) { return Expr::binary(ExprKind::Div, a, b); }
Expr operator-(const Expr& a) { return Expr::neg(a); }

// ---------------------------------------------------------------------------
// Parser

namespace {

class Parser {
 public:
  Parser(std::string_view text, int n_vars) : s_(text), n_(n_vars) {}

  Expr run() {
    Expr e = expr();
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw SyntaxError(pos_, what); }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      if (pos_ >= s_.size()) fail(std::string("expected '") + c + "' before end of input");
      fail(std::string("expected '") + c + "'");
    }
  }

  Expr expr() {
    Expr e = term();
    for (;;) {
      if (accept('+')) {
        e = e + term();
      } else if (accept('-')) {
        e = e - term();
      } else {
        return e;
      }
    }
  }

  Expr term() {
    Expr e = factor();
    for (;;) {
      if (accept('*')) {
        e = e * factor();
      } else if (accept('/')) {
        e = e / factor();
      } else {
        return e;
      }
    }
  }

  Expr factor() {
    if (accept('-')) return Expr::neg(factor());
    return power();
  }

  Expr power() {
    Expr base = atom();
    if (accept('^')) return Expr::pow(base, exponent());
    return base;
  }

  double exponent() {
    double sign = 1.0;
    if (accept('-')) {
      sign = -1.0;
    } else {
      accept('+');
    }
    skip_ws();
    double v = sign * number_literal();
    if (accept('^')) v = std::pow(v, exponent());
    return v;
  }

  double number_literal() {
    skip_ws();
    const std::size_t start = pos_;
    std::size_t end = pos_;
    while (end < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[end])) || s_[end] == '.'))
      ++end;
    if (end < s_.size() && (s_[end] == 'e' || s_[end] == 'E')) {
      std::size_t e = end + 1;
      if (e < s_.size() && (s_[e] == '+' || s_[e] == '-')) ++e;
      if (e < s_.size() && std::isdigit(static_cast<unsigned char>(s_[e]))) {
        end = e;
        while (end < s_.size() && std::isdigit(static_cast<unsigned char>(s_[end]))) ++end;
      }
    }
    double v = 0.0;
    const auto res = std::from_chars(s_.data() + start, s_.data() + end, v);
    if (start == end || res.ec != std::errc() || res.ptr != s_.data() + end) {
      if (pos_ >= s_.size()) fail("expected a number before end of input");
      fail("expected a number");
    }
    pos_ = end;
    return v;
  }

  Expr atom() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      return Expr::number(number_literal());
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      const std::string_view word = s_.substr(start, pos_ - start);
      static constexpr std::pair<std::string_view, Func> kFuncs[] = {
          {"exp", Func::Exp},  {"ln", Func::Ln},     {"sin", Func::Sin},
          {"cos", Func::Cos},  {"sinh", Func::Sinh}, {"cosh", Func::Cosh},
      };
      for (const auto& [name, f] : kFuncs) {
        if (word == name) {
          expect('(');
          Expr arg = expr();
          expect(')');
          return Expr::call(f, arg);
        }
      }
      if (word.size() > 1 && word[0] == 'x' &&
          word.find_first_not_of("0123456789", 1) == std::string_view::npos) {
        int k = 0;
        std::from_chars(word.data() + 1, word.data() + word.size(), k);
        if (k < 1 || k > n_) {
          throw Error(ErrorCode::VariableOutOfRange,
                      std::string(word) + " at offset " + std::to_string(start) + " in a " +
                          std::to_string(n_) + "-variable chart");
        }
        return Expr::variable(k - 1);
      }
      throw Error(ErrorCode::UnknownIdentifier,
                  "'" + std::string(word) + "' at offset " + std::to_string(start));
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  std::string_view s_;
  int n_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse(std::string_view text, int n_vars) { return Parser(text, n_vars).run(); }

Expr remap_variables(const Expr& e, std::span<const int> mapping) {
  switch (e.kind()) {
    case ExprKind::Number: return e;
    case ExprKind::Variable:
      if (e.variable() >= static_cast<int>(mapping.size())) {
        throw Error(ErrorCode::VariableOutOfRange, "no mapping for " + e.to_string());
      }
      return Expr::variable(mapping[e.variable()]);
    case ExprKind::Pow: return Expr::pow(remap_variables(e.lhs(), mapping), e.number());
    case ExprKind::Neg: return Expr::neg(remap_variables(e.lhs(), mapping));
    case ExprKind::Call: return Expr::call(e.func(), remap_variables(e.lhs(), mapping));
    default:
      return Expr::binary(e.kind(), remap_variables(e.lhs(), mapping),
                          remap_variables(e.rhs(), mapping));
  }
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

[[noreturn]] void domain_error(const Expr& e, const std::string& why) {
  throw Error(ErrorCode::DomainError, why + " in " + e.to_string());
}

// f(a) with f'(a) = d1 and f''(a) = d2.
Jet2 chain(const Jet2& a, double f, double d1, double d2) {
  Jet2 r;
  r.value = f;
  r.grad = d1 * a.grad;
  r.hess = d1 * a.hess + d2 * (a.grad * a.grad.transpose());
  return r;
}

struct Derivs {
  double f, d1, d2;
};

Derivs func_derivs(const Expr& e, Func f, double x) {
  switch (f) {
    case Func::Exp: {
      const double v = std::exp(x);
      return {v, v, v};
    }
    case Func::Ln:
      if (!(x > 0.0)) domain_error(e, "ln of non-positive value " + format_number(x));
      return {std::log(x), 1.0 / x, -1.0 / (x * x)};
    case Func::Sin: return {std::sin(x), std::cos(x), -std::sin(x)};
    case Func::Cos: return {std::cos(x), -std::sin(x), -std::cos(x)};
    case Func::Sinh: return {std::sinh(x), std::cosh(x), std::sinh(x)};
    case Func::Cosh: return {std::cosh(x), std::sinh(x), std::cosh(x)};
  }
  return {0, 0, 0};
}

Derivs pow_derivs(const Expr& e, double x, double p) {
  const bool integral = std::floor(p) == p;
  if (x < 0.0 && !integral) {
    domain_error(e, "non-integer power of negative value " + format_number(x));
  }
  if (x == 0.0 && p < 0.0) domain_error(e, "negative power of zero");
  if (p == 0.0) return {1.0, 0.0, 0.0};
  const double d1 = p * std::pow(x, p - 1.0);
  const double d2 = (p == 1.0) ? 0.0 : p * (p - 1.0) * std::pow(x, p - 2.0);
  return {std::pow(x, p), d1, d2};
}

Jet2 jet(const Expr& e, const Vector& x) {
  const Eigen::Index n = x.size();
  Jet2 r;
  switch (e.kind()) {
    case ExprKind::Number:
      r.value = e.number();
      r.grad = Vector::Zero(n);
      r.hess = Matrix::Zero(n, n);
      break;
    case ExprKind::Variable:
      if (e.variable() >= n) {
        throw Error(ErrorCode::VariableOutOfRange, e.to_string() + " at a point of dimension " +
                                                       std::to_string(n));
      }
      r.value = x(e.variable());
      r.grad = Vector::Zero(n);
      r.grad(e.variable()) = 1.0;
      r.hess = Matrix::Zero(n, n);
      break;
    case ExprKind::Add:
    case ExprKind::Sub: {
      const Jet2 a = jet(e.lhs(), x);
      const Jet2 b = jet(e.rhs(), x);
      const double s = e.kind() == ExprKind::Add ? 1.0 : -1.0;
      r.value = a.value + s * b.value;
      r.grad = a.grad + s * b.grad;
      r.hess = a.hess + s * b.hess;
      break;
    }
    case ExprKind::Mul: {
      const Jet2 a = jet(e.lhs(), x);
      const Jet2 b = jet(e.rhs(), x);
      r.value = a.value * b.value;
      r.grad = b.value * a.grad + a.value * b.grad;
      r.hess = b.value * a.hess + a.value * b.hess + a.grad * b.grad.transpose() +
               b.grad * a.grad.transpose();
      break;
    }
    case ExprKind::Div: {
      const Jet2 a = jet(e.lhs(), x);
      const Jet2 b = jet(e.rhs(), x);
      if (b.value == 0.0) domain_error(e, "division by zero");
      const double inv = 1.0 / b.value;
      const Jet2 rb = chain(b, inv, -inv * inv, 2.0 * inv * inv * inv);
      r.value = a.value * rb.value;
      r.grad = rb.value * a.grad + a.value * rb.grad;
      r.hess = rb.value * a.hess + a.value * rb.hess + a.grad * rb.grad.transpose() +
               rb.grad * a.grad.transpose();
      break;
    }
    case ExprKind::Pow: {
      const Jet2 a = jet(e.lhs(), x);
      const Derivs d = pow_derivs(e, a.value, e.number());
      r = chain(a, d.f, d.d1, d.d2);
      break;
    }
    case ExprKind::Neg: {
      const Jet2 a = jet(e.lhs(), x);
      r.value = -a.value;
      r.grad = -a.grad;
      r.hess = -a.hess;
      break;
    }
    case ExprKind::Call: {
      const Jet2 a = jet(e.lhs(), x);
      const Derivs d = func_derivs(e, e.func(), a.value);
      r = chain(a, d.f, d.d1, d.d2);
      break;
    }
  }
  if (!std::isfinite(r.value) || !r.grad.allFinite() || !r.hess.allFinite()) {
    domain_error(e, "non-finite result");
  }
  return r;
}

double value(const Expr& e, const Vector& x) {
  double v = 0.0;
  switch (e.kind()) {
    case ExprKind::Number: v = e.number(); break;
    case ExprKind::Variable:
      if (e.variable() >= x.size()) {
        throw Error(ErrorCode::VariableOutOfRange, e.to_string());
      }
      v = x(e.variable());
      break;
    case ExprKind::Add: v = value(e.lhs(), x) + value(e.rhs(), x); break;
    case ExprKind::Sub: v = value(e.lhs(), x) - value(e.rhs(), x); break;
    case ExprKind::Mul: v = value(e.lhs(), x) * value(e.rhs(), x); break;
    case ExprKind::Div: {
      const double b = value(e.rhs(), x);
      if (b == 0.0) domain_error(e, "division by zero");
      v = value(e.lhs(), x) / b;
      break;
    }
    case ExprKind::Pow: {
      const double a = value(e.lhs(), x);
      if (a < 0.0 && std::floor(e.number()) != e.number()) {
        domain_error(e, "non-integer power of negative value " + format_number(a));
      }
      if (a == 0.0 && e.number() < 0.0) domain_error(e, "negative power of zero");
      v = std::pow(a, e.number());
      break;
    }
    case ExprKind::Neg: v = -value(e.lhs(), x); break;
    case ExprKind::Call: v = func_derivs(e, e.func(), value(e.lhs(), x)).f; break;
  }
  if (!std::isfinite(v)) domain_error(e, "non-finite result");
  return v;
}

}  // namespace

Jet2 eval_jet2(const Expr& e, const Vector& point) {
  Jet2 r = jet(e, point);
  r.hess = 0.5 * (r.hess + r.hess.transpose()).eval();
  return r;
}

double eval(const Expr& e, const Vector& point) { return value(e, point); }

}  // namespace pvm
