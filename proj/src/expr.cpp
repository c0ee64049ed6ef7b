#include "charfol/expr.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <cstring>

namespace charfol {
namespace {

using NodePtr = std::shared_ptr<const ExprNode>;

NodePtr make_leaf(ExprKind kind, double value, int index) {
  auto n = std::make_shared<ExprNode>();
  n->kind = kind;
  n->value = value;
  n->index = index;
  return n;
}

NodePtr make_node(ExprKind kind, NodePtr lhs, NodePtr rhs = nullptr) {
  auto n = std::make_shared<ExprNode>();
  n->kind = kind;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

bool is_binary(ExprKind k) {
  return k == ExprKind::Add || k == ExprKind::Sub || k == ExprKind::Mul || k == ExprKind::Div ||
         k == ExprKind::Pow;
}

const char* function_name(ExprKind k) {
  switch (k) {
    case ExprKind::Sin: return "sin";
    case ExprKind::Cos: return "cos";
    case ExprKind::Tan: return "tan";
    case ExprKind::Exp: return "exp";
    case ExprKind::Log: return "log";
    case ExprKind::Sqrt: return "sqrt";
    case ExprKind::Abs: return "abs";
    default: return nullptr;
  }
}

char operator_symbol(ExprKind k) {
  switch (k) {
    case ExprKind::Add: return '+';
    case ExprKind::Sub: return '-';
    case ExprKind::Mul: return '*';
    case ExprKind::Div: return '/';
    default: return '^';
  }
}

const char* variable_name(int index, int arity) {
  static const char* xyz[] = {"x", "y", "z"};
  static const char* uv[] = {"u", "v"};
  return arity == 2 ? uv[index] : xyz[index];
}

class Parser {
 public:
  Parser(std::string_view text, int arity) : text_(text), arity_(arity) {}

  NodePtr parse_all() {
    NodePtr e = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(pos_, what); }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = make_node(ExprKind::Add, lhs, term());
      } else if (accept('-')) {
        lhs = make_node(ExprKind::Sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = power();
    for (;;) {
      if (accept('*')) {
        lhs = make_node(ExprKind::Mul, lhs, power());
      } else if (accept('/')) {
        lhs = make_node(ExprKind::Div, lhs, power());
      } else {
        return lhs;
      }
    }
  }

  NodePtr power() {
    NodePtr base = prefix();
    if (accept('^')) return make_node(ExprKind::Pow, base, power());
    return base;
  }

  NodePtr prefix() {
    if (accept('-')) return make_node(ExprKind::Neg, prefix());
    return primary();
  }

  NodePtr primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  NodePtr number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
      ++pos_;
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t q = pos_ + 1;
      if (q < text_.size() && (text_[q] == '+' || text_[q] == '-')) ++q;
      if (q < text_.size() && std::isdigit(static_cast<unsigned char>(text_[q]))) {
        pos_ = q;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      }
    }
    double value = 0.0;
    const char* first = text_.data() + start;
    const char* last = text_.data() + pos_;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
      pos_ = start;
      fail("malformed number");
    }
    return make_leaf(ExprKind::Constant, value, 0);
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    const std::string_view name = text_.substr(start, pos_ - start);

    static constexpr std::pair<std::string_view, ExprKind> functions[] = {
        {"sin", ExprKind::Sin}, {"cos", ExprKind::Cos},   {"tan", ExprKind::Tan}, {"exp", ExprKind::Exp},
        {"log", ExprKind::Log}, {"sqrt", ExprKind::Sqrt}, {"abs", ExprKind::Abs}};
    for (const auto& [fname, kind] : functions) {
      if (name == fname) {
        if (!accept('(')) fail("expected '(' after " + std::string(name));
        NodePtr arg = expr();
        if (!accept(')')) fail("expected ')'");
        return make_node(kind, arg);
      }
    }

    const int index = variable_index(name);
    if (index < 0) {
      pos_ = start;
      if (variable_index_any(name) >= 0)
        fail("variable '" + std::string(name) + "' is not available for arity " + std::to_string(arity_));
      fail("unknown identifier '" + std::string(name) + "'");
    }
    return make_leaf(ExprKind::Variable, 0.0, index);
  }

  int variable_index(std::string_view name) const {
    for (int i = 0; i < arity_; ++i)
      if (name == variable_name(i, arity_)) return i;
    return -1;
  }

  static int variable_index_any(std::string_view name) {
    if (name == "x" || name == "y" || name == "z" || name == "u" || name == "v") return 0;
    return -1;
  }

  std::string_view text_;
  int arity_;
  std::size_t pos_ = 0;
};

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool nodes_equal(const ExprNode& a, const ExprNode& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case ExprKind::Constant:
      return std::memcmp(&a.value, &b.value, sizeof(double)) == 0;
    case ExprKind::Variable:
      return a.index == b.index;
    default:
      break;
  }
  if (!nodes_equal(*a.lhs, *b.lhs)) return false;
  if (is_binary(a.kind)) return nodes_equal(*a.rhs, *b.rhs);
  return true;
}

std::size_t count_leaves(const ExprNode& n) {
  if (n.kind == ExprKind::Constant || n.kind == ExprKind::Variable) return 1;
  std::size_t total = count_leaves(*n.lhs);
  if (is_binary(n.kind)) total += count_leaves(*n.rhs);
  return total;
}

void require_same_arity(const Expr& a, const Expr& b) {
  if (a.arity() != b.arity()) throw PreconditionError("expression arity mismatch");
}

Expr binary(ExprKind kind, const Expr& a, const Expr& b) {
  require_same_arity(a, b);
  return Expr(make_node(kind, a.node(), b.node()), a.arity());
}

Expr unary(ExprKind kind, const Expr& a) { return Expr(make_node(kind, a.node()), a.arity()); }

}  // namespace

Expr Expr::constant(double value, int arity) { return Expr(make_leaf(ExprKind::Constant, value, 0), arity); }

Expr Expr::variable(int index, int arity) {
  if (arity != 2 && arity != 3) throw PreconditionError("arity must be 2 or 3");
  if (index < 0 || index >= arity) throw PreconditionError("variable index out of range");
  return Expr(make_leaf(ExprKind::Variable, 0.0, index), arity);
}

std::size_t Expr::leaf_count() const { return count_leaves(*root_); }

bool operator==(const Expr& a, const Expr& b) { return a.arity() == b.arity() && nodes_equal(a.root(), b.root()); }

Expr parse(std::string_view text, int arity) {
  if (arity != 2 && arity != 3) throw PreconditionError("arity must be 2 or 3");
  return Expr(Parser(text, arity).parse_all(), arity);
}

std::string to_string(const ExprNode& n, int arity) {
  switch (n.kind) {
    case ExprKind::Constant:
      return format_number(n.value);
    case ExprKind::Variable:
      return variable_name(n.index, arity);
    case ExprKind::Neg:
      return "-(" + to_string(*n.lhs, arity) + ")";
    default:
      break;
  }
  if (const char* fn = function_name(n.kind)) return std::string(fn) + "(" + to_string(*n.lhs, arity) + ")";
  return "(" + to_string(*n.lhs, arity) + " " + operator_symbol(n.kind) + " " + to_string(*n.rhs, arity) + ")";
}

std::string to_string(const Expr& e) { return to_string(e.root(), e.arity()); }

Expr operator+(const Expr& a, const Expr& b) { return binary(ExprKind::Add, a, b); }
Expr operator-(const Expr& a, const Expr& b) { return binary(ExprKind::Sub, a, b); }
Expr operator*(const Expr& a, const Expr& b) { return binary(ExprKind::Mul, a, b); }
Expr operator/(const Expr& a, const Expr& b) { return binary(ExprKind::Div, a, b); }
Expr operator-(const Expr& a) { return unary(ExprKind::Neg, a); }
Expr operator*(double a, const Expr& b) { return Expr::constant(a, b.arity()) * b; }
Expr operator+(const Expr& a, double b) { return a + Expr::constant(b, a.arity()); }
Expr pow(const Expr& a, const Expr& b) { return binary(ExprKind::Pow, a, b); }
Expr sin(const Expr& a) { return unary(ExprKind::Sin, a); }
Expr cos(const Expr& a) { return unary(ExprKind::Cos, a); }
Expr exp(const Expr& a) { return unary(ExprKind::Exp, a); }

namespace detail {

void throw_domain(const ExprNode& n, int arity, const char* what) { throw DomainError(to_string(n, arity), what); }

bool integer_literal(const ExprNode& e, int& k) {
  if (e.kind == ExprKind::Neg) {
    if (!integer_literal(*e.lhs, k)) return false;
    k = -k;
    return true;
  }
  if (e.kind != ExprKind::Constant || e.value != std::round(e.value) || std::abs(e.value) > 1e6) return false;
  k = static_cast<int>(e.value);
  return true;
}

}  // namespace detail
}  // namespace charfol
