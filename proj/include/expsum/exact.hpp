#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>

namespace expsum {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// An element of the Q-span of square roots of squarefree positive integers,
/// stored as radicand -> rational coefficient (radicand 1 is the rational part).
/// Square roots of distinct squarefree integers are linearly independent over
/// Q, so this representation is canonical and equality is structural.
class ExactValue {
 public:
  ExactValue() = default;
  explicit ExactValue(Rational r);
  static ExactValue integer(std::int64_t v) { return ExactValue(Rational(v)); }
  // c * sqrt(d); d >= 0 arbitrary, reduced to squarefree form.
  static ExactValue sqrt_of(std::int64_t d, Rational c = 1);

  const std::map<std::int64_t, Rational>& terms() const { return terms_; }

  bool is_zero() const { return terms_.empty(); }
  bool is_rational() const;
  // Single term c*sqrt(d) (rational counts, d = 1).
  bool is_monomial() const { return terms_.size() <= 1; }
  Rational rational_part() const;

  long double to_long_double() const;
  double to_double() const { return static_cast<double>(to_long_double()); }

  ExactValue operator-() const;
  ExactValue& operator+=(const ExactValue& o);
  ExactValue& operator-=(const ExactValue& o);
  ExactValue operator+(const ExactValue& o) const;
  ExactValue operator-(const ExactValue& o) const;
  ExactValue operator*(const ExactValue& o) const;
  ExactValue operator*(const Rational& r) const;
  // Division by a nonzero monomial; returns nullopt otherwise.
  std::optional<ExactValue> divided_by(const ExactValue& o) const;

  bool operator==(const ExactValue& o) const { return terms_ == o.terms_; }
  bool operator!=(const ExactValue& o) const { return !(*this == o); }

  // Canonical text, parseable by the frequency expression grammar,
  // e.g. "1/2+3*sqrt(2)".
  std::string to_string() const;

 private:
  void add_term(std::int64_t radicand, const Rational& c);
  std::map<std::int64_t, Rational> terms_;
};

// Splits d > 0 into s^2 * f with f squarefree; returns {s, f}.
std::pair<std::int64_t, std::int64_t> squarefree_split(std::int64_t d);

std::string rational_to_string(const Rational& r);

}  // namespace expsum
