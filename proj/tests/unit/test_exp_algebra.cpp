#include "doctest.h"

#include "expsum/error.hpp"
#include "expsum/exp_algebra.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace expsum;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

LatticePtr lattice_1d(std::vector<std::string> freqs) {
  std::vector<Frequency> fs;
  for (auto& s : freqs) fs.push_back(parse_frequency({s}));
  return std::make_shared<const FrequencyLattice>(find_basis(fs));
}

LatticePtr lattice_unit_2d() {
  return std::make_shared<const FrequencyLattice>(
      find_basis({parse_frequency({"1", "0"}), parse_frequency({"0", "1"})}));
}

bool close(Complex a, Complex b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

bool same_sum(const ExpSum& a, const ExpSum& b, double tol = 1e-12) {
  ExpSum d = a - b;
  for (const auto& [m, c] : d.terms())
    if (std::abs(c) > tol) return false;
  return true;
}

// Leibniz permutation-sum determinant, independent of the cofactor expansion.
ExpSum leibniz_det(const ExpSystem& S) {
  const std::size_t n = S.n();
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  ExpSum acc(S.lattice_ptr(), {});
  do {
    int inversions = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (perm[i] > perm[j]) ++inversions;
    ExpSum prod = ExpSum::constant(S.lattice_ptr(), inversions % 2 ? -1.0 : 1.0);
    for (std::size_t j = 0; j < n; ++j) prod = multiply(prod, S.components[j].derivative(perm[j]));
    acc = acc + prod;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return acc;
}

// Unrestricted truncated geometric series, carried to the given order.
Complex naive_constant_term(const ExpSum& Ft, const ExpSum& H, std::size_t order) {
  const ExpSum one = ExpSum::constant(Ft.lattice_ptr(), 1.0);
  const ExpSum step = one - Ft;
  ExpSum power = one;
  ExpSum series = one;
  for (std::size_t k = 1; k <= order; ++k) {
    power = multiply(power, step);
    series = series + power;
  }
  return multiply(H, series).constant_term();
}

ExpSum random_sum(const LatticePtr& L, std::mt19937_64& rng, int terms, int range) {
  std::uniform_int_distribution<int> coord(-range, range);
  std::normal_distribution<double> g;
  std::map<Exponent, Complex> t;
  for (int i = 0; i < terms; ++i) {
    Exponent m(L->rank());
    for (auto& v : m) v = coord(rng);
    t[m] += Complex(g(rng), g(rng));
  }
  return ExpSum(L, t);
}

std::vector<Complex> random_point(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-0.3, 0.3), v(-5.0, 5.0);
  std::vector<Complex> z(n);
  for (auto& x : z) x = Complex(u(rng), v(rng));
  return z;
}

}  // namespace

TEST_CASE("multiply examples") {
  auto L = lattice_1d({"1"});
  ExpSum one_plus = ExpSum(L, {{{0}, 1.0}, {{1}, 1.0}});
  ExpSum one_minus = ExpSum(L, {{{0}, 1.0}, {{1}, -1.0}});
  ExpSum p = multiply(one_plus, one_minus);
  CHECK(p.size() == 2);
  CHECK(p.coefficient({0}) == Complex(1.0));
  CHECK(p.coefficient({2}) == Complex(-1.0));
  CHECK(p.coefficient({1}) == Complex(0.0));
  CHECK(same_sum(multiply(one_plus, ExpSum::constant(L, 1.0)), one_plus));

  auto L2 = lattice_1d({"1", "sqrt(2)"});
  ExpSum a(L2, {{{0, 0}, 1.0}, {{1, 0}, 1.0}});
  ExpSum b(L2, {{{0, 0}, 1.0}, {{0, 1}, 1.0}});
  ExpSum ab = multiply(a, b);
  CHECK(ab.size() == 4);
  CHECK(ab.coefficient({1, 1}) == Complex(1.0));
  CHECK(std::abs(ab.frequency({1, 1})(0) - (1.0 + std::sqrt(2.0))) < 1e-15);

  CHECK_THROWS_AS(multiply(a, one_plus), Error);
  try {
    multiply(a, one_plus);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::LatticeMismatch);
  }
}

TEST_CASE("evaluate examples") {
  auto L = lattice_1d({"1"});
  ExpSum F(L, {{{0}, 1.0}, {{1}, 1.0}});
  std::vector<Complex> z{Complex(0, 0.5)};
  CHECK(std::abs(evaluate(F, z)) < 1e-15);
  z[0] = 0.0;
  CHECK(std::abs(evaluate(F, z) - 2.0) < 1e-15);

  auto L2 = lattice_unit_2d();
  ExpSum F2(L2, {{{0, 0}, 1.0}, {{1, 0}, 1.0}, {{0, 1}, 1.0}});
  std::vector<Complex> w{Complex(0, 0.5), Complex(0, 0.5)};
  CHECK(std::abs(evaluate(F2, w) - Complex(-1.0)) < 1e-15);
  CompiledExpSum C(F2);
  CHECK(std::abs(C(w) - Complex(-1.0)) < 1e-15);
}

TEST_CASE("product evaluates to product of values") {
  std::mt19937_64 rng(11);
  auto L = lattice_1d({"1", "sqrt(2)", "sqrt(3)"});
  for (int trial = 0; trial < 50; ++trial) {
    ExpSum F = random_sum(L, rng, 5, 2), G = random_sum(L, rng, 4, 2);
    ExpSum FG = multiply(F, G);
    for (int k = 0; k < 5; ++k) {
      auto z = random_point(1, rng);
      const Complex lhs = evaluate(FG, z), rhs = evaluate(F, z) * evaluate(G, z);
      // Relative to the absolute-value sum so cancellation does not dominate.
      double scale = 0.0;
      for (const auto& [m, c] : FG.terms()) scale += std::abs(c) * std::exp(kTwoPi * FG.frequency(m)(0) * z[0].real());
      CHECK(std::abs(lhs - rhs) <= 1e-12 * scale);
    }
  }
}

TEST_CASE("jacobian_det examples") {
  auto L = lattice_1d({"1"});
  ExpSystem S1{{ExpSum(L, {{{0}, 1.0}, {{1}, 1.0}})}};
  ExpSum J1 = jacobian_det(S1);
  CHECK(J1.size() == 1);
  CHECK(close(J1.coefficient({1}), kTwoPi, 1e-15));

  auto L2 = lattice_unit_2d();
  ExpSystem S2{{ExpSum(L2, {{{0, 0}, 1.0}, {{1, 0}, 1.0}}), ExpSum(L2, {{{0, 0}, 1.0}, {{0, 1}, 1.0}})}};
  ExpSum J2 = jacobian_det(S2);
  CHECK(J2.size() == 1);
  CHECK(close(J2.coefficient({1, 1}), kTwoPi * kTwoPi, 1e-15));
}

TEST_CASE("jacobian_det agrees with the permutation-sum expansion") {
  std::mt19937_64 rng(5);
  auto L2 = lattice_unit_2d();
  for (int trial = 0; trial < 20; ++trial) {
    ExpSystem S{{random_sum(L2, rng, 3, 2), random_sum(L2, rng, 3, 2)}};
    CHECK(same_sum(jacobian_det(S), leibniz_det(S), 1e-9));
  }
  auto L3 = std::make_shared<const FrequencyLattice>(find_basis(
      {parse_frequency({"1", "0", "0"}), parse_frequency({"0", "1", "0"}), parse_frequency({"0", "0", "1"})}));
  for (int trial = 0; trial < 5; ++trial) {
    ExpSystem S{{random_sum(L3, rng, 3, 1), random_sum(L3, rng, 3, 1), random_sum(L3, rng, 3, 1)}};
    CHECK(same_sum(jacobian_det(S), leibniz_det(S), 1e-8));
  }
}

TEST_CASE("jacobian_det commutes with imaginary shifts") {
  std::mt19937_64 rng(8);
  auto L = std::make_shared<const FrequencyLattice>(
      find_basis({parse_frequency({"1", "0"}), parse_frequency({"0", "1"}), parse_frequency({"sqrt(2)", "1/2"})}));
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 10; ++trial) {
    ExpSystem S{{random_sum(L, rng, 3, 1), random_sum(L, rng, 3, 1)}};
    const std::vector<double> y0{u(rng), u(rng)};
    ExpSystem shifted;
    for (const auto& F : S.components) {
      std::map<Exponent, Complex> t;
      for (const auto& [m, c] : F.terms()) {
        const Eigen::VectorXd a = F.frequency(m);
        t[m] = c * std::exp(Complex(0, kTwoPi * (a(0) * y0[0] + a(1) * y0[1])));
      }
      shifted.components.emplace_back(L, t);
    }
    const ExpSum J = jacobian_det(S), Js = jacobian_det(shifted);
    auto z = random_point(2, rng);
    std::vector<Complex> zs{z[0] + Complex(0, y0[0]), z[1] + Complex(0, y0[1])};
    CHECK(close(evaluate(Js, z), evaluate(J, zs), 1e-10));
  }
}

TEST_CASE("normalize_at_vertex examples") {
  auto L = lattice_1d({"1"});
  auto [Ft, d] = normalize_at_vertex(ExpSum(L, {{{0}, 1.0}, {{1}, 1.0}}), {1});
  CHECK(d == Complex(1.0));
  CHECK(Ft.size() == 2);
  CHECK(Ft.coefficient({0}) == Complex(1.0));
  CHECK(Ft.coefficient({-1}) == Complex(1.0));

  auto [Ft2, d2] = normalize_at_vertex(ExpSum(L, {{{2}, 3.0}, {{5}, 6.0}}), {2});
  CHECK(d2 == Complex(3.0));
  CHECK(Ft2.coefficient({0}) == Complex(1.0));
  CHECK(close(Ft2.coefficient({3}), 2.0, 1e-15));

  ExpSum F3(L, {{{0}, 1.0}, {{1}, 1.0}, {{2}, 1.0}});
  CHECK_THROWS_AS(normalize_at_vertex(F3, {1}), Error);
  try {
    normalize_at_vertex(F3, {1});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotAVertex);
  }
  // Not in the support at all.
  CHECK_THROWS_AS(normalize_at_vertex(F3, {3}), Error);
}

TEST_CASE("vertex_constant_term examples") {
  auto L = lattice_1d({"1"});
  ExpSum Ft(L, {{{0}, 1.0}, {{-1}, 1.0}});
  ExpSum H = ExpSum::monomial(L, {1}, kTwoPi);
  CHECK(close(vertex_constant_term(Ft, H), -kTwoPi, 1e-14));
  CHECK(close(naive_constant_term(Ft, H, 4), -kTwoPi, 1e-14));

  ExpSum Ft2(L, {{{0}, 1.0}, {{1}, 1.0}});
  ExpSum H2 = ExpSum::monomial(L, {2}, kTwoPi);
  CHECK(std::abs(vertex_constant_term(Ft2, H2)) == 0.0);
  CHECK(std::abs(naive_constant_term(Ft2, H2, 6)) == 0.0);

  std::mt19937_64 rng(3);
  auto L2 = lattice_1d({"1", "sqrt(2)"});
  for (int trial = 0; trial < 20; ++trial) {
    ExpSum F = random_sum(L2, rng, 5, 2);
    for (const auto& [m, c] : F.terms()) {
      if (!is_spectrum_vertex(F, m)) continue;
      auto [Fv, dv] = normalize_at_vertex(F, m);
      CHECK(close(vertex_constant_term(Fv, ExpSum::constant(L2, 1.0)), 1.0, 1e-15));
    }
  }
}

TEST_CASE("vertex_constant_term rejects non-pointed supports") {
  auto L = lattice_1d({"1"});
  ExpSum Ft(L, {{{-1}, 0.5}, {{0}, 1.0}, {{1}, 0.5}});
  ExpSum H = ExpSum::constant(L, 1.0);
  CHECK_THROWS_AS(vertex_constant_term(Ft, H), Error);
  try {
    vertex_constant_term(Ft, H);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ConeViolation);
  }
}

TEST_CASE("vertex_constant_term is stable in the truncation depth and matches the full series") {
  std::mt19937_64 rng(21);
  auto L2 = lattice_1d({"1", "sqrt(2)"});
  auto Lu = lattice_unit_2d();
  int checked = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const LatticePtr& L = trial % 2 ? L2 : Lu;
    ExpSum F = random_sum(L, rng, 4, 2);
    ExpSum H = random_sum(L, rng, 4, 3);
    for (const auto& [m, c] : F.terms()) {
      if (!is_spectrum_vertex(F, m)) continue;
      auto [Ft, d] = normalize_at_vertex(F, m);
      const ConstantTermReport rep = vertex_constant_term_report(Ft, H);
      const Complex extended = vertex_constant_term(Ft, H, 3);
      double scale = 1.0;
      for (const auto& [e, v] : H.terms()) scale = std::max(scale, std::abs(v));
      CHECK(std::abs(rep.value - extended) <= 1e-12 * scale * std::pow(4.0, static_cast<double>(rep.depth)));
      if (rep.depth <= 6) {
        const Complex naive = naive_constant_term(Ft, H, 2 * rep.depth + 2);
        CHECK(std::abs(rep.value - naive) <= 1e-10 * scale * std::pow(4.0, static_cast<double>(rep.depth)));
        ++checked;
      }
    }
  }
  CHECK(checked > 20);
}

TEST_CASE("trigonometric polynomial round trip") {
  std::mt19937_64 rng(4);
  auto L = std::make_shared<const FrequencyLattice>(
      find_basis({parse_frequency({"1", "0"}), parse_frequency({"sqrt(2)", "1"}), parse_frequency({"0", "sqrt(3)"})}));
  std::normal_distribution<double> g;
  std::uniform_int_distribution<int> coord(-2, 2);
  std::vector<TrigTerm> terms;
  for (int i = 0; i < 6; ++i) {
    Exponent m{coord(rng), coord(rng), coord(rng)};
    terms.push_back({frequency_from_exact(L->exact_frequency_of(m)), g(rng), g(rng)});
  }
  TrigPoly T(2, terms);
  ExpSum F = trig_to_expsum(T, L);
  TrigPoly back = expsum_to_trig(F);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int k = 0; k < 100; ++k) {
    Eigen::VectorXd x(2);
    x << u(rng), u(rng);
    std::vector<Complex> z{Complex(0, x(0)), Complex(0, x(1))};
    const double t = T(x);
    CHECK(std::abs(back(x) - t) <= 1e-12 * std::max(1.0, T.coefficient_scale()));
    CHECK(std::abs(evaluate(F, z) - t) <= 1e-12 * std::max(1.0, T.coefficient_scale()));
  }
  Eigen::VectorXd x(2), grad, grad2;
  Eigen::MatrixXd hess;
  x << 0.3, -0.7;
  const double h = 1e-6;
  T.value_gradient_hessian(x, grad, hess);
  for (int k = 0; k < 2; ++k) {
    Eigen::VectorXd xp = x, xm = x;
    xp(k) += h;
    xm(k) -= h;
    CHECK(std::abs((T(xp) - T(xm)) / (2 * h) - grad(k)) < 1e-5 * std::max(1.0, grad.norm()));
    Eigen::VectorXd gp, gm;
    T.value_gradient(xp, gp);
    T.value_gradient(xm, gm);
    CHECK(((gp - gm) / (2 * h) - hess.col(k)).norm() < 1e-4 * std::max(1.0, hess.norm()));
  }
}
