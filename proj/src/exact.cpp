#include "expsum/exact.hpp"

#include "expsum/error.hpp"

#include <cmath>
#include <numeric>

namespace expsum {

std::pair<std::int64_t, std::int64_t> squarefree_split(std::int64_t d) {
  if (d <= 0) fail(ErrorCode::DomainError, "squarefree_split needs d > 0");
  std::int64_t square = 1;
  std::int64_t rest = d;
  for (std::int64_t p = 2; p * p <= rest; ++p) {
    while (rest % (p * p) == 0) {
      rest /= p * p;
      square *= p;
    }
  }
  return {square, rest};
}

std::string rational_to_string(const Rational& r) {
  const BigInt num = boost::multiprecision::numerator(r);
  const BigInt den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

ExactValue::ExactValue(Rational r) {
  if (r != 0) terms_.emplace(1, std::move(r));
}

ExactValue ExactValue::sqrt_of(std::int64_t d, Rational c) {
  if (d < 0) fail(ErrorCode::DomainError, "square root of a negative integer");
  ExactValue out;
  if (d == 0 || c == 0) return out;
  auto [s, f] = squarefree_split(d);
  out.add_term(f, c * s);
  return out;
}

bool ExactValue::is_rational() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first == 1);
}

Rational ExactValue::rational_part() const {
  auto it = terms_.find(1);
  return it == terms_.end() ? Rational(0) : it->second;
}

long double ExactValue::to_long_double() const {
  long double acc = 0.0L;
  for (const auto& [d, c] : terms_) {
    const long double coef = static_cast<long double>(c);
    acc += d == 1 ? coef : coef * std::sqrt(static_cast<long double>(d));
  }
  return acc;
}

void ExactValue::add_term(std::int64_t radicand, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.emplace(radicand, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

ExactValue ExactValue::operator-() const {
  ExactValue out = *this;
  for (auto& [d, c] : out.terms_) c = -c;
  return out;
}

ExactValue& ExactValue::operator+=(const ExactValue& o) {
  for (const auto& [d, c] : o.terms_) add_term(d, c);
  return *this;
}

ExactValue& ExactValue::operator-=(const ExactValue& o) {
  for (const auto& [d, c] : o.terms_) add_term(d, -c);
  return *this;
}

ExactValue ExactValue::operator+(const ExactValue& o) const {
  ExactValue out = *this;
  out += o;
  return out;
}

ExactValue ExactValue::operator-(const ExactValue& o) const {
  ExactValue out = *this;
  out -= o;
  return out;
}

ExactValue ExactValue::operator*(const ExactValue& o) const {
  ExactValue out;
  for (const auto& [a, ca] : terms_) {
    for (const auto& [b, cb] : o.terms_) {
      // sqrt(a)*sqrt(b) = g*sqrt((a/g)*(b/g)) for squarefree a, b.
      const std::int64_t g = std::gcd(a, b);
      out.add_term((a / g) * (b / g), ca * cb * g);
    }
  }
  return out;
}

ExactValue ExactValue::operator*(const Rational& r) const {
  ExactValue out;
  for (const auto& [d, c] : terms_) out.add_term(d, c * r);
  return out;
}

std::optional<ExactValue> ExactValue::divided_by(const ExactValue& o) const {
  if (o.terms_.size() != 1) return std::nullopt;
  const auto& [d, c] = *o.terms_.begin();
  // x / (c*sqrt(d)) = x * sqrt(d) / (c*d)
  ExactValue root;
  root.add_term(d, Rational(1));
  return (*this * root) * (Rational(1) / (c * d));
}

std::string ExactValue::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [d, c] : terms_) {
    Rational mag = c < 0 ? Rational(-c) : c;
    if (!first) out += c < 0 ? "-" : "+";
    else if (c < 0) out += "-";
    first = false;
    if (d == 1) {
      out += rational_to_string(mag);
    } else {
      if (mag != 1) out += rational_to_string(mag) + "*";
      out += "sqrt(" + std::to_string(d) + ")";
    }
  }
  return out;
}

}  // namespace expsum
