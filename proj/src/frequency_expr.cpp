#include "expsum/frequency_expr.hpp"

#include "expsum/error.hpp"

#include <cctype>
#include <charconv>

namespace expsum {

bool ExprNode::operator==(const ExprNode& o) const {
  if (kind != o.kind || text != o.text) return false;
  auto same = [](const ExprPtr& a, const ExprPtr& b) {
    if (!a || !b) return !a && !b;
    return *a == *b;
  };
  return same(lhs, o.lhs) && same(rhs, o.rhs);
}

namespace {

using Kind = ExprNode::Kind;

ExprPtr leaf(Kind k, std::string text) {
  return std::make_shared<const ExprNode>(ExprNode{k, std::move(text), nullptr, nullptr});
}

ExprPtr node(Kind k, ExprPtr a, ExprPtr b = nullptr) {
  return std::make_shared<const ExprNode>(ExprNode{k, {}, std::move(a), std::move(b)});
}

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  ExprPtr parse() {
    skip_ws();
    if (pos_ >= s_.size()) error("empty expression");
    ExprPtr e = expr();
    skip_ws();
    if (pos_ != s_.size()) error("unexpected character '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void error(const std::string& msg) const {
    fail(ErrorCode::SyntaxError, msg + " at position " + std::to_string(pos_));
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  ExprPtr expr() {
    ExprPtr lhs = term();
    for (;;) {
      if (eat('+')) lhs = node(Kind::Add, lhs, term());
      else if (eat('-')) lhs = node(Kind::Sub, lhs, term());
      else return lhs;
    }
  }

  ExprPtr term() {
    ExprPtr lhs = factor();
    for (;;) {
      if (eat('*')) lhs = node(Kind::Mul, lhs, factor());
      else if (eat('/')) lhs = node(Kind::Div, lhs, factor());
      else return lhs;
    }
  }

  ExprPtr factor() {
    skip_ws();
    if (pos_ >= s_.size()) error("unexpected end of expression");
    const char c = s_[pos_];
    if (c == '-') { ++pos_; return node(Kind::Neg, factor()); }
    if (c == '+') { ++pos_; return node(Kind::Pos, factor()); }
    if (c == '(') {
      ++pos_;
      ExprPtr inner = expr();
      if (!eat(')')) error("expected ')'");
      return inner;
    }
    if (s_.substr(pos_, 4) == "sqrt") {
      pos_ += 4;
      if (!eat('(')) error("expected '(' after sqrt");
      skip_ws();
      const std::size_t start = pos_;
      if (pos_ < s_.size() && s_[pos_] == '-') ++pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (start == pos_ || s_[pos_ - 1] == '-') error("sqrt argument must be an integer literal");
      std::string digits(s_.substr(start, pos_ - start));
      if (!eat(')')) error("expected ')' after sqrt argument");
      return leaf(Kind::Sqrt, std::move(digits));
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    error("unexpected character '" + std::string(1, c) + "'");
  }

  ExprPtr number() {
    const std::size_t start = pos_;
    bool decimal = false;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (pos_ < s_.size() && s_[pos_] == '.') {
      decimal = true;
      ++pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      decimal = true;
      ++pos_;
      if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
      const std::size_t exp_start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (exp_start == pos_) error("malformed exponent");
    }
    std::string text(s_.substr(start, pos_ - start));
    if (text == ".") error("malformed number");
    return leaf(decimal ? Kind::Decimal : Kind::Integer, std::move(text));
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

int precedence(Kind k) {
  switch (k) {
    case Kind::Add:
    case Kind::Sub: return 1;
    case Kind::Mul:
    case Kind::Div: return 2;
    case Kind::Neg:
    case Kind::Pos: return 3;
    default: return 4;
  }
}

struct Evaluated {
  bool exact = true;
  ExactValue exact_value;
  long double approx = 0.0L;
};

Evaluated eval(const ExprNode& n) {
  Evaluated out;
  switch (n.kind) {
    case Kind::Integer: {
      out.exact_value = ExactValue(Rational(BigInt(n.text)));
      out.approx = out.exact_value.to_long_double();
      return out;
    }
    case Kind::Decimal: {
      out.exact = false;
      out.approx = std::stold(n.text);
      return out;
    }
    case Kind::Sqrt: {
      const BigInt d(n.text);
      if (d < 0) fail(ErrorCode::DomainError, "square root of a negative integer: " + n.text);
      if (d > BigInt(std::numeric_limits<std::int64_t>::max() / 4)) {
        fail(ErrorCode::DomainError, "sqrt argument too large: " + n.text);
      }
      out.exact_value = ExactValue::sqrt_of(static_cast<std::int64_t>(d));
      out.approx = out.exact_value.to_long_double();
      return out;
    }
    case Kind::Neg:
    case Kind::Pos: {
      Evaluated a = eval(*n.lhs);
      if (n.kind == Kind::Neg) {
        a.exact_value = -a.exact_value;
        a.approx = -a.approx;
      }
      return a;
    }
    default: break;
  }
  const Evaluated a = eval(*n.lhs);
  const Evaluated b = eval(*n.rhs);
  out.exact = a.exact && b.exact;
  switch (n.kind) {
    case Kind::Add:
      out.approx = a.approx + b.approx;
      if (out.exact) out.exact_value = a.exact_value + b.exact_value;
      break;
    case Kind::Sub:
      out.approx = a.approx - b.approx;
      if (out.exact) out.exact_value = a.exact_value - b.exact_value;
      break;
    case Kind::Mul:
      out.approx = a.approx * b.approx;
      if (out.exact) out.exact_value = a.exact_value * b.exact_value;
      break;
    case Kind::Div: {
      if (out.exact) {
        if (b.exact_value.is_zero()) fail(ErrorCode::DomainError, "division by zero");
        auto q = a.exact_value.divided_by(b.exact_value);
        if (!q) fail(ErrorCode::DomainError, "division by a sum of square roots is not supported");
        out.exact_value = *q;
        out.approx = out.exact_value.to_long_double();
      } else {
        if (b.approx == 0.0L) fail(ErrorCode::DomainError, "division by zero");
        out.approx = a.approx / b.approx;
      }
      break;
    }
    default: fail(ErrorCode::Internal, "bad expression node");
  }
  if (out.exact) out.approx = out.exact_value.to_long_double();
  return out;
}

}  // namespace

ExprPtr parse_expr_tree(std::string_view text) { return Parser(text).parse(); }

std::string print_expr_tree(const ExprNode& n) {
  switch (n.kind) {
    case Kind::Integer:
    case Kind::Decimal: return n.text;
    case Kind::Sqrt: return "sqrt(" + n.text + ")";
    case Kind::Neg:
    case Kind::Pos: {
      std::string inner = print_expr_tree(*n.lhs);
      if (precedence(n.lhs->kind) < precedence(n.kind)) inner = "(" + inner + ")";
      return (n.kind == Kind::Neg ? "-" : "+") + inner;
    }
    default: break;
  }
  const int p = precedence(n.kind);
  std::string lhs = print_expr_tree(*n.lhs);
  std::string rhs = print_expr_tree(*n.rhs);
  if (precedence(n.lhs->kind) < p) lhs = "(" + lhs + ")";
  // Left-associative grammar: an equal-precedence right operand needs parentheses.
  if (precedence(n.rhs->kind) <= p) rhs = "(" + rhs + ")";
  const char* op = n.kind == Kind::Add ? "+" : n.kind == Kind::Sub ? "-" : n.kind == Kind::Mul ? "*" : "/";
  return lhs + op + rhs;
}

FrequencyValue evaluate_expr_tree(const ExprPtr& tree) {
  const Evaluated e = eval(*tree);
  FrequencyValue out;
  out.exact = e.exact;
  out.value = static_cast<double>(e.approx);
  if (e.exact) out.exact_value = e.exact_value;
  out.tree = tree;
  out.source = print_expr_tree(*tree);
  return out;
}

FrequencyValue parse_frequency_expr(std::string_view text) {
  FrequencyValue v = evaluate_expr_tree(parse_expr_tree(text));
  v.source = std::string(text);
  return v;
}

}  // namespace expsum
