#include "doctest.h"

#include "expsum/error.hpp"
#include "expsum/frequency_expr.hpp"

#include <cmath>
#include <random>

using namespace expsum;

TEST_CASE("frequency expressions evaluate exactly") {
  auto r2 = parse_frequency_expr("sqrt(2)");
  CHECK(r2.exact);
  CHECK(r2.value == doctest::Approx(1.4142135624).epsilon(1e-10));
  CHECK(r2.exact_value == ExactValue::sqrt_of(2));

  auto q = parse_frequency_expr("3/7");
  CHECK(q.exact);
  CHECK(q.exact_value == ExactValue(Rational(3, 7)));

  auto s = parse_frequency_expr("1+2*sqrt(3)");
  CHECK(s.exact);
  CHECK(s.exact_value == ExactValue::integer(1) + ExactValue::sqrt_of(3, 2));
  CHECK(s.value == doctest::Approx(1 + 2 * std::sqrt(3.0)));
}

TEST_CASE("surd arithmetic reduces radicands") {
  CHECK(parse_frequency_expr("sqrt(8)").exact_value == ExactValue::sqrt_of(2, 2));
  CHECK(parse_frequency_expr("sqrt(2)*sqrt(3)").exact_value == ExactValue::sqrt_of(6));
  CHECK(parse_frequency_expr("sqrt(2)*sqrt(2)").exact_value == ExactValue::integer(2));
  CHECK(parse_frequency_expr("sqrt(2)/5").exact_value == ExactValue::sqrt_of(2, Rational(1, 5)));
  CHECK(parse_frequency_expr("1/sqrt(2)").exact_value == ExactValue::sqrt_of(2, Rational(1, 2)));
  CHECK(parse_frequency_expr("sqrt(4)").exact_value.is_rational());
  CHECK(parse_frequency_expr("-(1+sqrt(5))/2").value == doctest::Approx(-(1 + std::sqrt(5.0)) / 2));
}

TEST_CASE("decimal literals are tagged approximate") {
  auto d = parse_frequency_expr("1.5");
  CHECK_FALSE(d.exact);
  CHECK(d.value == 1.5);
  CHECK_FALSE(parse_frequency_expr("sqrt(2)+1e-3").exact);
}

TEST_CASE("syntax and domain errors") {
  auto code_of = [](const char* s) {
    try {
      parse_frequency_expr(s);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::Internal;
  };
  CHECK(code_of("") == ErrorCode::SyntaxError);
  CHECK(code_of("1+") == ErrorCode::SyntaxError);
  CHECK(code_of("sqrt(x)") == ErrorCode::SyntaxError);
  CHECK(code_of("(1") == ErrorCode::SyntaxError);
  CHECK(code_of("sqrt(-2)") == ErrorCode::DomainError);
  CHECK(code_of("1/0") == ErrorCode::DomainError);
  CHECK(code_of("1/(1+sqrt(2))") == ErrorCode::DomainError);

  try {
    parse_frequency_expr("1 + $");
    FAIL("expected a syntax error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("position 4") != std::string::npos);
  }
}

namespace {

ExprPtr random_tree(std::mt19937& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 2 : 8);
  const int k = pick(rng);
  auto leaf = [](ExprNode::Kind kind, std::string t) {
    return std::make_shared<const ExprNode>(ExprNode{kind, std::move(t), nullptr, nullptr});
  };
  std::uniform_int_distribution<int> num(0, 40);
  switch (k) {
    case 0: return leaf(ExprNode::Kind::Integer, std::to_string(num(rng)));
    case 1: return leaf(ExprNode::Kind::Sqrt, std::to_string(num(rng)));
    case 2: return leaf(ExprNode::Kind::Decimal, std::to_string(num(rng)) + ".25");
    case 3: return std::make_shared<const ExprNode>(ExprNode{ExprNode::Kind::Neg, {}, random_tree(rng, depth - 1), nullptr});
    case 4: return std::make_shared<const ExprNode>(ExprNode{ExprNode::Kind::Pos, {}, random_tree(rng, depth - 1), nullptr});
    default: {
      static const ExprNode::Kind ops[] = {ExprNode::Kind::Add, ExprNode::Kind::Sub, ExprNode::Kind::Mul,
                                           ExprNode::Kind::Div};
      return std::make_shared<const ExprNode>(
          ExprNode{ops[k - 5], {}, random_tree(rng, depth - 1), random_tree(rng, depth - 1)});
    }
  }
}

}  // namespace

TEST_CASE("parse(print(tree)) reproduces the token tree") {
  std::mt19937 rng(20240611);
  for (int i = 0; i < 500; ++i) {
    const ExprPtr t = random_tree(rng, 5);
    const std::string text = print_expr_tree(*t);
    const ExprPtr back = parse_expr_tree(text);
    INFO(text);
    CHECK(*back == *t);
  }
  for (const char* s : {"1+2*sqrt(3)", "-(1-2)-3", "1/2/3", "1/(2/3)", "--4", "2*-sqrt(5)"}) {
    const ExprPtr t = parse_expr_tree(s);
    CHECK(*parse_expr_tree(print_expr_tree(*t)) == *t);
  }
}
