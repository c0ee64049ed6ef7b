#pragma once

// Scalar expressions over (x, y, z) or (u, v).
//
// Grammar (whitespace-insensitive):
//   expr    := term   (('+' | '-') term)*
//   term    := power  (('*' | '/') power)*
//   power   := prefix ('^' power)?          right-associative
//   prefix  := '-' prefix | primary         unary minus binds tighter than '^'
//   primary := number | variable | func '(' expr ')' | '(' expr ')'
//   func    := sin | cos | tan | exp | log | sqrt | abs
//
// An Expr is an immutable handle to a shared tree; copies are cheap and
// evaluation is pure, so one Expr may be evaluated from many threads.

#include "charfol/jet.hpp"
#include "charfol/types.hpp"

#include <memory>
#include <span>
#include <string>
#include <string_view>

namespace charfol {

enum class ExprKind { Constant, Variable, Neg, Sin, Cos, Tan, Exp, Log, Sqrt, Abs, Add, Sub, Mul, Div, Pow };

struct ExprNode {
  ExprKind kind = ExprKind::Constant;
  double value = 0.0;  // Constant
  int index = 0;       // Variable
  std::shared_ptr<const ExprNode> lhs;
  std::shared_ptr<const ExprNode> rhs;
};

class Expr {
 public:
  Expr() : Expr(constant(0.0, 3)) {}

  static Expr constant(double value, int arity);
  static Expr variable(int index, int arity);

  int arity() const { return arity_; }
  const ExprNode& root() const { return *root_; }
  const std::shared_ptr<const ExprNode>& node() const { return root_; }

  /// Number of constant and variable leaves.
  std::size_t leaf_count() const;

  /// Structural equality of the trees (constants compared bitwise).
  friend bool operator==(const Expr& a, const Expr& b);

  Expr(std::shared_ptr<const ExprNode> root, int arity) : root_(std::move(root)), arity_(arity) {}

 private:
  std::shared_ptr<const ExprNode> root_;
  int arity_ = 3;
};

/// Parses `text` for the given arity (3: x, y, z; 2: u, v).
Expr parse(std::string_view text, int arity);

/// Prints an expression that parses back to a structurally identical tree.
std::string to_string(const Expr& e);
std::string to_string(const ExprNode& n, int arity);

// Combinators. Operands must share an arity.
Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr operator*(double a, const Expr& b);
Expr operator+(const Expr& a, double b);
Expr pow(const Expr& a, const Expr& b);
Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr exp(const Expr& a);

namespace detail {

[[noreturn]] void throw_domain(const ExprNode& n, int arity, const char* what);

/// True when `e` is a (possibly negated) integer literal; the value goes to `k`.
bool integer_literal(const ExprNode& e, int& k);

template <typename T>
T eval_node(const ExprNode& n, std::span<const T> vars, int arity) {
  switch (n.kind) {
    case ExprKind::Constant:
      return T(n.value);
    case ExprKind::Variable:
      return vars[static_cast<std::size_t>(n.index)];
    case ExprKind::Neg:
      return -eval_node(*n.lhs, vars, arity);
    case ExprKind::Sin:
      return charfol::sin(eval_node(*n.lhs, vars, arity));
    case ExprKind::Cos:
      return charfol::cos(eval_node(*n.lhs, vars, arity));
    case ExprKind::Tan: {
      const T a = eval_node(*n.lhs, vars, arity);
      if (std::cos(value_of(a)) == 0.0) throw_domain(n, arity, "tan at a pole");
      return charfol::tan(a);
    }
    case ExprKind::Exp:
      return charfol::exp(eval_node(*n.lhs, vars, arity));
    case ExprKind::Log: {
      const T a = eval_node(*n.lhs, vars, arity);
      if (!(value_of(a) > 0.0)) throw_domain(n, arity, "log of a non-positive value");
      return charfol::log(a);
    }
    case ExprKind::Sqrt: {
      const T a = eval_node(*n.lhs, vars, arity);
      const double av = value_of(a);
      if (av < 0.0 || (is_autodiff_v<T> && av == 0.0))
        throw_domain(n, arity, "sqrt outside its differentiable domain");
      return charfol::sqrt(a);
    }
    case ExprKind::Abs:
      return charfol::abs(eval_node(*n.lhs, vars, arity));
    case ExprKind::Add:
      return eval_node(*n.lhs, vars, arity) + eval_node(*n.rhs, vars, arity);
    case ExprKind::Sub:
      return eval_node(*n.lhs, vars, arity) - eval_node(*n.rhs, vars, arity);
    case ExprKind::Mul:
      return eval_node(*n.lhs, vars, arity) * eval_node(*n.rhs, vars, arity);
    case ExprKind::Div: {
      const T b = eval_node(*n.rhs, vars, arity);
      if (value_of(b) == 0.0) throw_domain(n, arity, "division by zero");
      return eval_node(*n.lhs, vars, arity) / b;
    }
    case ExprKind::Pow: {
      const T a = eval_node(*n.lhs, vars, arity);
      const ExprNode& e = *n.rhs;
      if (int k = 0; integer_literal(e, k)) {
        if (k < 0 && value_of(a) == 0.0) throw_domain(n, arity, "negative power of zero");
        return charfol::powi(a, k);
      }
      if (!(value_of(a) > 0.0)) throw_domain(n, arity, "non-integer power of a non-positive base");
      return charfol::exp(eval_node(e, vars, arity) * charfol::log(a));
    }
  }
  throw_domain(n, arity, "unknown node");
}

}  // namespace detail

/// Evaluates `e` with variables of any supported scalar type.
template <typename T>
T evaluate(const Expr& e, std::span<const T> vars) {
  if (static_cast<int>(vars.size()) != e.arity())
    throw PreconditionError("evaluate: point arity " + std::to_string(vars.size()) +
                            " does not match expression arity " + std::to_string(e.arity()));
  T out = detail::eval_node<T>(e.root(), vars, e.arity());
  if (!std::isfinite(value_of(out))) detail::throw_domain(e.root(), e.arity(), "non-finite result");
  return out;
}

inline double evaluate(const Expr& e, const Vec3& p) {
  return evaluate<double>(e, std::span<const double>(p.data(), 3));
}

/// Value, gradient and Hessian at a point of dimension N.
template <int N>
Jet2<N> eval_jet2(const Expr& e, const Eigen::Matrix<double, N, 1>& p) {
  std::array<Jet2<N>, N> vars;
  for (int i = 0; i < N; ++i) vars[static_cast<std::size_t>(i)] = Jet2<N>::variable(p[i], i);
  return evaluate<Jet2<N>>(e, std::span<const Jet2<N>>(vars.data(), vars.size()));
}

template <int N>
Dual<N> eval_dual(const Expr& e, const Eigen::Matrix<double, N, 1>& p) {
  std::array<Dual<N>, N> vars;
  for (int i = 0; i < N; ++i) vars[static_cast<std::size_t>(i)] = Dual<N>::variable(p[i], i);
  return evaluate<Dual<N>>(e, std::span<const Dual<N>>(vars.data(), vars.size()));
}

}  // namespace charfol
