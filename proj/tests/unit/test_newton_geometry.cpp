#include "doctest.h"

#include "expsum/error.hpp"
#include "expsum/linear_program.hpp"
#include "expsum/newton_geometry.hpp"
#include "oracles/geometry_oracle.hpp"

#include <cmath>
#include <random>

using namespace expsum;

namespace {

Eigen::VectorXd v2(double x, double y) {
  Eigen::VectorXd v(2);
  v << x, y;
  return v;
}

Eigen::VectorXd v1(double x) { return Eigen::VectorXd::Constant(1, x); }

Polytope from_oracle(const std::vector<oracle::Pt>& h) {
  std::vector<Eigen::VectorXd> pts;
  for (const auto& p : h) pts.push_back(v2(static_cast<double>(p.first), static_cast<double>(p.second)));
  return convex_hull(pts);
}

Polytope transformed(const Polytope& P, const Eigen::MatrixXd& M, const Eigen::VectorXd& t) {
  std::vector<Eigen::VectorXd> pts;
  for (const auto& v : P.vertices) pts.push_back(M * v + t);
  return convex_hull(pts);
}

LatticePtr unit_lattice(std::size_t n) {
  std::vector<Frequency> fs;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::string> comp(n, "0");
    comp[i] = "1";
    fs.push_back(parse_frequency(comp));
  }
  return std::make_shared<const FrequencyLattice>(find_basis(fs));
}

std::vector<oracle::Pt> random_points(std::mt19937_64& rng, int count, int range) {
  std::uniform_int_distribution<int> c(-range, range);
  std::vector<oracle::Pt> p;
  for (int i = 0; i < count; ++i) p.emplace_back(c(rng), c(rng));
  return p;
}

bool same_vertex_set(const Polytope& A, const Polytope& B, double tol = 1e-12) {
  if (A.vertices.size() != B.vertices.size()) return false;
  for (const auto& a : A.vertices) {
    bool found = false;
    for (const auto& b : B.vertices) found = found || (a - b).norm() <= tol;
    if (!found) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("newton_polytope examples") {
  auto L = std::make_shared<const FrequencyLattice>(find_basis({parse_frequency({"1"})}));
  Polytope P = newton_polytope(ExpSum(L, {{{0}, 1.0}, {{1}, 1.0}}));
  REQUIRE(P.vertices.size() == 2);
  CHECK(P.vertices[0](0) == 0.0);
  CHECK(P.vertices[1](0) == 1.0);
  CHECK(P.dim == 1);

  Polytope Q = newton_polytope(ExpSum(L, {{{0}, 1.0}, {{1}, 1.0}, {{2}, 1.0}}));
  REQUIRE(Q.vertices.size() == 2);
  CHECK(Q.tags[0] == Exponent{0});
  CHECK(Q.tags[1] == Exponent{2});

  auto L2 = unit_lattice(2);
  Polytope T = newton_polytope(ExpSum(L2, {{{0, 0}, 1.0}, {{1, 0}, 1.0}, {{0, 1}, 1.0}}));
  CHECK(T.vertices.size() == 3);
  CHECK(T.dim == 2);
  CHECK(std::abs(volume(T) - 0.5) < 1e-15);
}

TEST_CASE("newton_polytope resolves near-collinear surd points exactly") {
  // 1, sqrt2 and their sum scaled: (0,0), (1, sqrt2), (2, 2 sqrt2) are collinear.
  auto L = std::make_shared<const FrequencyLattice>(
      find_basis({parse_frequency({"1", "sqrt(2)"}), parse_frequency({"0", "1"})}));
  ExpSum F(L, {{{0, 0}, 1.0}, {{1, 0}, 1.0}, {{2, 0}, 1.0}});
  Polytope P = newton_polytope(F);
  CHECK(P.vertices.size() == 2);
  CHECK(P.dim == 1);
}

TEST_CASE("minkowski_sum examples") {
  Polytope seg = convex_hull({v1(0), v1(1)});
  auto D = minkowski_sum({seg, seg});
  REQUIRE(D.total.vertices.size() == 2);
  CHECK(D.total.vertices[1](0) == 2.0);
  CHECK(D.provenance[1] == std::vector<std::size_t>{1, 1});

  Polytope e1 = convex_hull({v2(0, 0), v2(1, 0)}), e2 = convex_hull({v2(0, 0), v2(0, 1)});
  auto S = minkowski_sum({e1, e2});
  CHECK(S.total.vertices.size() == 4);
  CHECK(std::abs(volume(S.total) - 1.0) < 1e-15);
  for (std::size_t v = 0; v < 4; ++v) {
    const Eigen::VectorXd sum = e1.vertices[S.provenance[v][0]] + e2.vertices[S.provenance[v][1]];
    CHECK((sum - S.total.vertices[v]).norm() == 0.0);
  }

  Polytope T = convex_hull({v2(0, 0), v2(1, 0), v2(0, 1)});
  auto TT = minkowski_sum({T, T});
  CHECK(TT.total.vertices.size() == 3);
  CHECK(std::abs(volume(TT.total) - 2.0) < 1e-15);
}

TEST_CASE("is_developed examples") {
  Polytope e1 = convex_hull({v2(0, 0), v2(1, 0)}), e2 = convex_hull({v2(0, 0), v2(0, 1)});
  CHECK(is_developed({e1, e2}).developed);

  Polytope T = convex_hull({v2(0, 0), v2(1, 0), v2(0, 1)});
  auto r = is_developed({T, T});
  REQUIRE_FALSE(r.developed);
  REQUIRE(r.witness);
  const Eigen::VectorXd xi = r.witness->witness.normalized();
  CHECK(std::abs(xi(0) - xi(1)) < 1e-9);
  CHECK(xi(0) > 0);
  CHECK(r.witness->faces[0].size() == 2);

  Polytope pt = convex_hull({v2(1, 1)});
  CHECK_THROWS_AS(is_developed({pt, T}), Error);
  try {
    is_developed({pt, T});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateInput);
  }

  CHECK(is_developed({convex_hull({v1(0), v1(1)})}).developed);
}

TEST_CASE("mixed_volume examples") {
  Polytope sq = convex_hull({v2(0, 0), v2(1, 0), v2(0, 1), v2(1, 1)});
  CHECK(std::abs(mixed_volume({sq, sq}) - 1.0) < 1e-12);
  Polytope e1 = convex_hull({v2(0, 0), v2(1, 0)}), e2 = convex_hull({v2(0, 0), v2(0, 1)});
  CHECK(std::abs(mixed_volume({e1, e2}) - 0.5) < 1e-12);
  Polytope T = convex_hull({v2(0, 0), v2(1, 0), v2(0, 1)});
  CHECK(std::abs(mixed_volume({T, T}) - 0.5) < 1e-12);

  std::vector<Polytope> axes;
  for (int i = 0; i < 3; ++i) {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(3), b = Eigen::VectorXd::Zero(3);
    b(i) = 1.0;
    axes.push_back(convex_hull({a, b}));
  }
  CHECK(std::abs(6.0 * mixed_volume(axes) - 1.0) < 1e-12);
  auto cube = minkowski_sum(axes).total;
  CHECK(cube.vertices.size() == 8);
  CHECK(std::abs(volume(cube) - 1.0) < 1e-12);
  CHECK(std::abs(mixed_volume({cube, cube, cube}) - 1.0) < 1e-12);

  std::vector<Polytope> four(4, convex_hull({Eigen::VectorXd::Zero(4), Eigen::VectorXd::Ones(4)}));
  CHECK_THROWS_AS(mixed_volume(four), Error);
}

TEST_CASE("planar geometry agrees with the integer oracles on random polygons") {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> count(2, 7);
  for (int trial = 0; trial < 200; ++trial) {
    auto hp = oracle::hull(random_points(rng, count(rng), 3));
    auto hq = oracle::hull(random_points(rng, count(rng), 3));
    if (hp.size() < 2 || hq.size() < 2) continue;
    Polytope P = from_oracle(hp), Q = from_oracle(hq);
    CHECK(P.vertices.size() == hp.size());
    CHECK(is_developed({P, Q}).developed == oracle::developed(hp, hq));
    CHECK(std::abs(2.0 * mixed_volume({P, Q}) - static_cast<double>(oracle::twice_mixed_area(hp, hq))) < 1e-9);
  }
}

TEST_CASE("mixed_volume is symmetric and Minkowski additive") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    Polytope P = from_oracle(oracle::hull(random_points(rng, 4, 2)));
    Polytope Q = from_oracle(oracle::hull(random_points(rng, 4, 2)));
    Polytope R = from_oracle(oracle::hull(random_points(rng, 4, 2)));
    const Polytope QR = minkowski_sum({Q, R}).total;
    CHECK(std::abs(mixed_volume({P, Q}) - mixed_volume({Q, P})) < 1e-12);
    CHECK(std::abs(mixed_volume({P, QR}) - mixed_volume({P, Q}) - mixed_volume({P, R})) < 1e-9);
  }
  std::uniform_int_distribution<int> c(-1, 1);
  auto random3 = [&]() {
    std::vector<Eigen::VectorXd> pts;
    for (int i = 0; i < 4; ++i) {
      Eigen::VectorXd p(3);
      p << c(rng), c(rng), c(rng);
      pts.push_back(p);
    }
    return convex_hull(pts);
  };
  for (int trial = 0; trial < 10; ++trial) {
    Polytope A = random3(), B = random3(), C = random3(), D = random3();
    const double abc = mixed_volume({A, B, C});
    CHECK(std::abs(abc - mixed_volume({C, A, B})) < 1e-9);
    CHECK(std::abs(abc - mixed_volume({B, C, A})) < 1e-9);
    const Polytope AD = minkowski_sum({A, D}).total;
    CHECK(std::abs(mixed_volume({AD, B, C}) - abc - mixed_volume({D, B, C})) < 1e-9);
  }
}

TEST_CASE("is_developed is invariant under translations and common linear maps") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 100; ++trial) {
    auto hp = oracle::hull(random_points(rng, 3, 2));
    auto hq = oracle::hull(random_points(rng, 3, 2));
    if (hp.size() < 2 || hq.size() < 2) continue;
    Polytope P = from_oracle(hp), Q = from_oracle(hq);
    const bool base = is_developed({P, Q}).developed;
    Eigen::MatrixXd M(2, 2);
    do M << u(rng), u(rng), u(rng), u(rng);
    while (std::abs(M.determinant()) < 0.2);
    const Eigen::VectorXd z = Eigen::VectorXd::Zero(2);
    CHECK(is_developed({transformed(P, Eigen::MatrixXd::Identity(2, 2), v2(u(rng), u(rng))),
                        transformed(Q, Eigen::MatrixXd::Identity(2, 2), v2(u(rng), u(rng)))})
              .developed == base);
    CHECK(is_developed({transformed(P, M, z), transformed(Q, M, z)}).developed == base);
  }
}

TEST_CASE("Minkowski provenance forms coordinated collections") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    Polytope P = from_oracle(oracle::hull(random_points(rng, 5, 3)));
    Polytope Q = from_oracle(oracle::hull(random_points(rng, 5, 3)));
    auto D = minkowski_sum({P, Q});
    for (std::size_t v = 0; v < D.total.vertices.size(); ++v) {
      // A functional maximized uniquely at the sum vertex is maximized at each summand vertex.
      Eigen::MatrixXd rows(static_cast<Eigen::Index>(D.total.vertices.size() - 1), 2);
      Eigen::Index r = 0;
      for (std::size_t w = 0; w < D.total.vertices.size(); ++w)
        if (w != v) rows.row(r++) = (D.total.vertices[v] - D.total.vertices[w]).transpose();
      const ConeFunctional cf = max_min_functional(rows);
      REQUIRE(cf.delta > 0);
      CHECK(maximizing_face(P, cf.xi) == std::vector<std::size_t>{D.provenance[v][0]});
      CHECK(maximizing_face(Q, cf.xi) == std::vector<std::size_t>{D.provenance[v][1]});
    }
  }
}

TEST_CASE("Newton polytope of a product is the Minkowski sum") {
  std::mt19937_64 rng(37);
  auto L = std::make_shared<const FrequencyLattice>(
      find_basis({parse_frequency({"1", "0"}), parse_frequency({"0", "1"}), parse_frequency({"sqrt(2)", "1/3"})}));
  std::uniform_int_distribution<int> c(-2, 2);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 30; ++trial) {
    std::map<Exponent, Complex> a, b;
    for (int i = 0; i < 4; ++i) {
      a[{c(rng), c(rng), c(rng)}] = Complex(g(rng), g(rng));
      b[{c(rng), c(rng), c(rng)}] = Complex(g(rng), g(rng));
    }
    ExpSum F(L, a), G(L, b);
    const Polytope lhs = newton_polytope(multiply(F, G));
    const auto rhs = minkowski_sum({newton_polytope(F), newton_polytope(G)});
    CHECK(same_vertex_set(lhs, rhs.total, 1e-12));
    REQUIRE(rhs.total.tagged());
    for (std::size_t v = 0; v < rhs.total.vertices.size(); ++v) {
      const Exponent& t = rhs.total.tags[v];
      CHECK(multiply(F, G).coefficient(t) != Complex(0.0));
    }
  }
}
