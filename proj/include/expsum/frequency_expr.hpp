#pragma once

#include "expsum/exact.hpp"

#include <memory>
#include <string>
#include <string_view>
#include <variant>

namespace expsum {

// Token tree for the frequency grammar:
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := ('+'|'-') factor | integer | decimal | 'sqrt' '(' integer ')' | '(' expr ')'
struct ExprNode {
  enum class Kind { Integer, Decimal, Sqrt, Neg, Pos, Add, Sub, Mul, Div };

  Kind kind;
  std::string text;  // literal lexeme for Integer/Decimal/Sqrt
  std::shared_ptr<const ExprNode> lhs;
  std::shared_ptr<const ExprNode> rhs;

  bool operator==(const ExprNode& o) const;
};

using ExprPtr = std::shared_ptr<const ExprNode>;

// Value of one frequency entry: exact when the tree has no decimal literal.
struct FrequencyValue {
  double value = 0.0;
  bool exact = true;
  ExactValue exact_value;  // meaningful only when exact
  ExprPtr tree;
  std::string source;
};

// Throws Error(SyntaxError) with the byte position, or Error(DomainError).
ExprPtr parse_expr_tree(std::string_view text);

// Minimal-parenthesis printing; parse(print(t)) reproduces t exactly.
std::string print_expr_tree(const ExprNode& node);

FrequencyValue evaluate_expr_tree(const ExprPtr& tree);

FrequencyValue parse_frequency_expr(std::string_view text);

}  // namespace expsum
