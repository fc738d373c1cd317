#include "doctest.h"

#include "expsum/error.hpp"
#include "expsum/torus_lab.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace expsum;

namespace {

constexpr double kPi = std::numbers::pi;

FrequencyLattice lattice_of(std::vector<std::vector<std::string>> freqs) {
  std::vector<Frequency> fs;
  for (auto& f : freqs) fs.push_back(parse_frequency(f));
  return find_basis(fs);
}

TrigTerm cos_term(const std::string& a, double c) { return {parse_frequency({a}), c, 0.0}; }
TrigTerm sin_term(const std::string& a, double d) { return {parse_frequency({a}), 0.0, d}; }

TrigPoly one_d(std::vector<TrigTerm> t) { return TrigPoly(1, std::move(t)); }

Region interval(double lo, double hi) { return Region{WindowShape::Box, {0.5 * (lo + hi)}, {0.5 * (hi - lo)}}; }

WindowSpec schedule_to(double lambda_max, std::size_t dim = 1) {
  WindowSpec W;
  W.center.assign(dim, 0.5);
  W.half.assign(dim, 0.5);
  W.lambda0 = lambda_max / 16.0;
  W.ratio = 2.0;
  W.J = 4;
  return W;
}

// Mean of f(Phi x) over [0, lambda] in closed form, for a single cosine monomial of rate r.
double cosine_mean(double r, double lambda) { return r == 0 ? 1.0 : std::sin(2 * kPi * r * lambda) / (2 * kPi * r * lambda); }

}  // namespace

TEST_CASE("build_lift examples") {
  const auto L = lattice_of({{"1"}, {"sqrt(2)"}});
  const auto lift = build_lift(L, LiftMode::Real);
  CHECK(lift.N == 2);
  CHECK(lift.dense);
  CHECK_FALSE(lift.periodic);
  CHECK(lift.Phi(0, 0) == doctest::Approx(1.0));
  CHECK(lift.Phi(1, 0) == doctest::Approx(std::sqrt(2.0)));

  const auto L2 = lattice_of({{"1", "0"}, {"0", "1"}});
  const auto p = build_lift(L2, LiftMode::Real);
  CHECK(p.N == 2);
  CHECK(p.periodic);

  const auto c = build_lift(L, LiftMode::Complex, 1.0);
  CHECK(c.torus_dim == 3);
  CHECK(c.orbit_dim == 2);
  Eigen::VectorXd z(2);
  z << 1.0, 0.25;  // Re z on the boundary of S_R lands inside the unit cube
  const auto a = c.angles(z);
  CHECK(a(0) > 0.0);
  CHECK(a(0) < 1.0);

  const auto deg = lattice_of({{"1", "sqrt(2)"}});
  try {
    build_lift(deg, LiftMode::Real);
    FAIL("expected OrbitDegenerate");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::OrbitDegenerate);
  }
}

TEST_CASE("pull_back and push_forward are inverse") {
  const auto L = lattice_of({{"1"}, {"sqrt(2)"}});
  TorusTrig f(2, {{{1, 0}, 0.5, 0.0}, {{1, -1}, 0.0, 2.0}, {{0, 0}, 3.0, 0.0}});
  const TrigPoly T = pull_back(f, L);
  const TorusTrig g = push_forward(T, L);
  const auto lift = build_lift(L, LiftMode::Real);
  for (double x : {-1.3, 0.0, 0.77, 12.5}) {
    Eigen::VectorXd xv(1);
    xv << x;
    CHECK(T(xv) == doctest::Approx(f(lift.angles(xv))).epsilon(1e-12));
    CHECK(g(lift.angles(xv)) == doctest::Approx(f(lift.angles(xv))).epsilon(1e-12));
  }
  CHECK_THROWS_AS(push_forward(one_d({cos_term("sqrt(3)", 1.0)}), L), Error);
}

TEST_CASE("orbit_average examples") {
  const auto L = lattice_of({{"1"}, {"sqrt(2)"}});
  const auto lift = build_lift(L, LiftMode::Real);
  const auto W = schedule_to(1e4);
  for (const auto& row : orbit_average(TorusTrig(2, {{{0, 0}, 1.0, 0.0}}), lift, W)) CHECK(row.average == doctest::Approx(1.0));
  const auto c1 = orbit_average(TorusTrig(2, {{{1, 0}, 1.0, 0.0}}), lift, W);
  CHECK(std::abs(c1.back().average) < 1e-3);
  // cos 2 pi phi1 cos 2 pi phi2 = (cos 2 pi (phi1 + phi2) + cos 2 pi (phi1 - phi2)) / 2
  const auto prod = orbit_average(TorusTrig(2, {{{1, 1}, 0.5, 0.0}, {{1, -1}, 0.5, 0.0}}), lift, W);
  CHECK(prod.back().abs_err <= 1e-2);
  CHECK(prod.back().exact == 0.0);
}

TEST_CASE("orbit_average matches closed-form cosine means") {
  const auto L = lattice_of({{"1"}, {"sqrt(2)"}, {"sqrt(3)"}});
  const auto lift = build_lift(L, LiftMode::Real);
  WindowSpec W;
  W.center = {0.5};
  W.half = {0.5};
  W.lambda0 = 3.7;
  W.J = 4;
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> k(-2, 2);
  for (int trial = 0; trial < 10; ++trial) {
    Exponent m{k(rng), k(rng), k(rng)};
    const double r = static_cast<double>(m[0]) + std::sqrt(2.0) * static_cast<double>(m[1]) + std::sqrt(3.0) * static_cast<double>(m[2]);
    const auto rows = orbit_average(TorusTrig(3, {{m, 1.0, 0.0}}), lift, W);
    for (const auto& row : rows) CHECK(row.average == doctest::Approx(cosine_mean(r, row.lambda)).epsilon(1e-10).scale(1.0));
  }
}

TEST_CASE("certified dense orbits average every small monomial to zero") {
  const auto L = lattice_of({{"1"}, {"sqrt(2)"}});
  const auto lift = build_lift(L, LiftMode::Real, 0.0, 2);
  REQUIRE(lift.dense);
  WindowSpec W = schedule_to(1e4);
  W.lambda0 = 1e4;
  W.J = 0;
  for (std::int64_t a = -2; a <= 2; ++a)
    for (std::int64_t b = -2; b <= 2; ++b) {
      if (a == 0 && b == 0) continue;
      const auto rows = orbit_average(TorusTrig(2, {{{a, b}, 1.0, 0.0}}), lift, W);
      CHECK(rows.front().abs_err <= 1e-2);
    }
}

TEST_CASE("orbit_average over planar boxes and balls") {
  const auto L = lattice_of({{"1", "0"}, {"0", "1"}, {"sqrt(2)", "sqrt(3)"}});
  const auto lift = build_lift(L, LiftMode::Real);
  WindowSpec box;
  box.center = {0.0, 0.0};
  box.half = {0.5, 0.5};
  box.lambda0 = 2.0;
  box.J = 4;
  WindowSpec ball = box;
  ball.shape = WindowShape::Ball;
  const TorusTrig one(3, {{{0, 0, 0}, 1.0, 0.0}});
  for (const auto& row : orbit_average(one, lift, ball)) CHECK(row.average == doctest::Approx(1.0).epsilon(1e-10));
  // Box integral of cos(2 pi (a.x)) factorizes into sinc terms.
  const TorusTrig f(3, {{{1, 0, 1}, 1.0, 0.0}});
  const double a = 1.0 + std::sqrt(2.0), b = std::sqrt(3.0);
  for (const auto& row : orbit_average(f, lift, box)) {
    const double h = row.lambda / 2.0;
    const double expect = (std::sin(2 * kPi * a * h) / (2 * kPi * a * h)) * (std::sin(2 * kPi * b * h) / (2 * kPi * b * h));
    CHECK(row.average == doctest::Approx(expect).epsilon(1e-9).scale(1.0));
  }
}

TEST_CASE("isolated_points examples") {
  SemiTrigSet V{1, {{{one_d({sin_term("1", 1.0)})}, {one_d({cos_term("1", 1.0)})}}}};
  const TrigPoly one = one_d({cos_term("0", 1.0)});
  const auto r = isolated_points(V, one, interval(0.0, 10.5));
  REQUIRE(r.points.size() == 11);
  for (std::size_t k = 0; k < 11; ++k) CHECK(r.points[k].x(0) == doctest::Approx(static_cast<double>(k)).epsilon(1e-12).scale(1.0));
  CHECK(r.undecided.empty());

  SemiTrigSet top{1, {{{one_d({cos_term("1", 1.0), cos_term("sqrt(2)", 1.0), cos_term("0", -2.0)})}, {}}}};
  const auto t = isolated_points(top, one, interval(-50.0, 50.0));
  REQUIRE(t.points.size() == 1);
  CHECK(std::abs(t.points[0].x(0)) < 1e-9);
}

TEST_CASE("two-variable isolated points") {
  auto E = [](const std::string& a, const std::string& b, double c) {
    return TrigTerm{parse_frequency({a, b}), c, 0.0};
  };
  const TrigPoly one(2, {E("0", "0", 1.0)});
  // sin 2 pi x = sin 2 pi y = 0 with cos 2 pi x > 0, cos 2 pi y > 0: the integer lattice.
  SemiTrigSet grid{2,
                   {{{TrigPoly(2, {{parse_frequency({"1", "0"}), 0.0, 1.0}}), TrigPoly(2, {{parse_frequency({"0", "1"}), 0.0, 1.0}})},
                     {TrigPoly(2, {E("1", "0", 1.0)}), TrigPoly(2, {E("0", "1", 1.0)})}}}};
  Region box{WindowShape::Box, {2.0, 2.0}, {1.5, 1.5}};
  CHECK(isolated_points(grid, one, box).points.size() == 9);

  // One equation with strict maxima: cos 2 pi x + cos 2 pi y = 2.
  SemiTrigSet peaks{2, {{{TrigPoly(2, {E("1", "0", 1.0), E("0", "1", 1.0), E("0", "0", -2.0)})}, {}}}};
  const auto p = isolated_points(peaks, TrigPoly(2, {E("1", "0", 1.0)}), Region{WindowShape::Box, {1.0, 1.0}, {1.5, 1.5}});
  CHECK(p.points.size() == 9);
  for (const auto& q : p.points) CHECK(q.value == doctest::Approx(1.0));

  // cos 2 pi x + cos 2 pi y = 0 is a union of curves: nothing is isolated.
  SemiTrigSet curve{2, {{{TrigPoly(2, {E("1", "0", 1.0), E("0", "1", 1.0)})}, {}}}};
  CHECK(isolated_points(curve, one, box).points.empty());
}

TEST_CASE("periodic closed form equals window averages") {
  const auto L = lattice_of({{"1"}});
  const auto lift = build_lift(L, LiftMode::Real);
  // cos 2 pi x = 0, sin 2 pi x > 0: x = 1/4 + k.
  SemiTrigSet V{1, {{{one_d({cos_term("1", 1.0)})}, {one_d({sin_term("1", 1.0)})}}}};
  const TrigPoly T = one_d({cos_term("0", 2.0), sin_term("1", 0.5)});  // 2.5 at every point
  const auto pm = periodic_mean(V, T, lift);
  CHECK(pm.points == 1);
  CHECK(pm.value == doctest::Approx(2.5));
  for (double lambda : {10.0, 20.0, 40.0}) {
    const auto r = isolated_points(V, T, interval(0.0, lambda));
    double s = 0.0;
    for (const auto& p : r.points) s += p.value;
    CHECK(s / lambda == doctest::Approx(pm.value).epsilon(1e-12));
  }

  const auto L2 = lattice_of({{"2", "0"}, {"0", "1"}});
  const auto lift2 = build_lift(L2, LiftMode::Real);
  auto E = [](const std::string& a, const std::string& b, double c, double d) {
    return TrigTerm{parse_frequency({a, b}), c, d};
  };
  SemiTrigSet V2{2, {{{TrigPoly(2, {E("2", "0", 0.0, 1.0)}), TrigPoly(2, {E("0", "1", 0.0, 1.0)})}, {}}}};
  const TrigPoly one(2, {E("0", "0", 1.0, 0.0)});
  const auto pm2 = periodic_mean(V2, one, lift2);
  // sin 4 pi x = sin 2 pi y = 0: x in Z/4, y in Z/2, so 8 points per unit area.
  CHECK(pm2.points == 4);
  CHECK(pm2.value == doctest::Approx(8.0));
}

TEST_CASE("transversal_volume_curve examples") {
  const auto L = lattice_of({{"1"}, {"sqrt(2)"}});
  const auto lift = build_lift(L, LiftMode::Real);
  const TorusTrig one(2, {{{0, 0}, 1.0, 0.0}});
  // {phi1 = 1/4} = {cos 2 pi phi1 = 0, sin 2 pi phi1 > 0}
  TorusSet v1{2, {TorusTrig(2, {{{1, 0}, 1.0, 0.0}})}, {TorusTrig(2, {{{1, 0}, 0.0, 1.0}})}};
  CHECK(transversal_volume_curve(v1, one, lift).value == doctest::Approx(1.0).epsilon(1e-9));
  TorusSet v2{2, {TorusTrig(2, {{{0, 1}, 1.0, 0.0}})}, {TorusTrig(2, {{{0, 1}, 0.0, 1.0}})}};
  CHECK(transversal_volume_curve(v2, one, lift).value == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
  const auto sep = transversal_volume_curve(v1, TorusTrig(2, {{{0, 1}, 1.0, 0.0}}), lift);
  CHECK(std::abs(sep.value) <= 1e-6);
  CHECK(sep.components == 2);

  std::ostringstream os;
  write_curve_csv(os, sep);
  CHECK(os.str().rfind("# schema_version=1", 0) == 0);
  CHECK(os.str().find("component,phi_1,phi_2,density,integrand\n") != std::string::npos);
}

TEST_CASE("transversal volume agrees with direct isolated-point counts") {
  const auto L = lattice_of({{"1"}, {"sqrt(2)"}});
  const auto lift = build_lift(L, LiftMode::Real);
  for (double c : {1.2, 0.5, -0.3}) {
    const TorusTrig h(2, {{{1, 0}, 1.0, 0.0}, {{0, 1}, 1.0, 0.0}, {{0, 0}, -c, 0.0}});
    const TorusSet Vt{2, {h}, {}};
    SemiTrigSet V{1, {{{pull_back(h, L)}, {}}}};
    for (const TorusTrig& w : {TorusTrig(2, {{{0, 0}, 1.0, 0.0}}), TorusTrig(2, {{{0, 0}, 1.0, 0.0}, {{1, 0}, 0.5, 0.0}})}) {
      const double curve = transversal_volume_curve(Vt, w, lift).value;
      const double lambda = 2000.0;
      const auto pts = isolated_points(V, pull_back(w, L), interval(0.0, lambda));
      double s = 0.0;
      for (const auto& p : pts.points) s += p.value;
      CHECK(s / lambda == doctest::Approx(curve).epsilon(0.02));
    }
  }
}

TEST_CASE("transversal volume on a three-torus") {
  // n = 2, N = 3: lift (x, y) -> (x, y, sqrt(2) x + sqrt(3) y).
  const auto L = lattice_of({{"1", "0"}, {"0", "1"}, {"sqrt(2)", "sqrt(3)"}});
  const auto lift = build_lift(L, LiftMode::Real);
  // phi1 = 1/4 and phi2 = 1/4 (with positivity): a single closed line along phi3.
  TorusSet V{3,
             {TorusTrig(3, {{{1, 0, 0}, 1.0, 0.0}}), TorusTrig(3, {{{0, 1, 0}, 1.0, 0.0}})},
             {TorusTrig(3, {{{1, 0, 0}, 0.0, 1.0}}), TorusTrig(3, {{{0, 1, 0}, 0.0, 1.0}})}};
  const auto r = transversal_volume_curve(V, TorusTrig(3, {{{0, 0, 0}, 1.0, 0.0}}), lift);
  // |det(e3, A^1, A^2)| = 1: one point of {x = 1/4 + Z, y = 1/4 + Z} per unit area.
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-9));
}
