#include "doctest.h"

#include "expsum/error.hpp"
#include "expsum/mean_value.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace expsum;

namespace {

LatticePtr lattice_of(std::vector<std::vector<std::string>> freqs) {
  std::vector<Frequency> fs;
  for (auto& f : freqs) fs.push_back(parse_frequency(f));
  return std::make_shared<const FrequencyLattice>(find_basis(fs));
}

ExpSum sum_of(const LatticePtr& L, std::map<Exponent, Complex> t) { return ExpSum(L, std::move(t)); }

WindowSpec unit_schedule(double lambda_max, std::size_t J = 4, std::size_t dim = 1) {
  WindowSpec W;
  W.center.assign(dim, 0.5);
  W.half.assign(dim, 0.5);
  W.ratio = 2.0;
  W.J = J;
  W.lambda0 = lambda_max / std::pow(2.0, static_cast<double>(J));
  return W;
}

Region interval(double lo, double hi) { return Region{WindowShape::Box, {0.5 * (lo + hi)}, {0.5 * (hi - lo)}}; }

}  // namespace

TEST_CASE("window_sum examples") {
  auto L = lattice_of({{"1"}});
  const ExpSum F = sum_of(L, {{{0}, 1.0}, {{1}, 1.0}});
  const ExpSum G = sum_of(L, {{{1}, 1.0}});
  const auto z = locate_zeros(ExpSystem{{F}}, StripBox{0.5, {{-1.0, 12.0}}});
  CHECK(std::abs(window_sum(z.zeros, G, interval(0.0, 10.0)) - Complex(-10.0)) < 1e-9);
  CHECK(std::abs(window_sum(z.zeros, G, interval(0.0, 10.4)) - Complex(-10.0)) < 1e-9);

  const ExpSum F2 = sum_of(L, {{{0}, 1.0}, {{1}, 2.0}, {{2}, 1.0}});
  const auto z2 = locate_zeros(ExpSystem{{F2}}, StripBox{0.5, {{-1.0, 12.0}}});
  CHECK(std::abs(window_sum(z2.zeros, G, interval(0.0, 10.0)) - Complex(-20.0)) < 1e-6);
}

TEST_CASE("estimate_mean examples") {
  auto L = lattice_of({{"1"}});
  const ExpSum F = sum_of(L, {{{0}, 1.0}, {{1}, 1.0}});
  const auto r = estimate_mean(ExpSystem{{F}}, sum_of(L, {{{1}, 1.0}}), unit_schedule(200.0));
  CHECK(r.rows.size() == 5);
  CHECK(r.rows.back().lambda == 200.0);
  CHECK(std::abs(r.rows.back().estimate - Complex(-1.0)) < 1e-6);
  CHECK_FALSE(r.nonconvergent);

  auto L2 = lattice_of({{"1"}, {"sqrt(2)"}});
  const ExpSum F2 = sum_of(L2, {{{0, 0}, 1.0}, {{1, 0}, 1.0}, {{0, 1}, 1.0}});
  const auto r2 = estimate_mean(ExpSystem{{F2}}, sum_of(L2, {{{0, 0}, 1.0}}), unit_schedule(500.0));
  CHECK(r2.rows.back().estimate.real() == doctest::Approx(std::sqrt(2.0)).epsilon(0.01));
  // Independent count by the argument principle over the same window.
  const double R = r2.strip_R;
  CHECK(static_cast<double>(r2.rows.back().points) == count_zeros_rect_1d(F2, {-R, R, 0.0, 500.0}));

  auto L3 = lattice_of({{"1"}, {"sqrt(3)"}});
  const ExpSum F3 = sum_of(L3, {{{0, 0}, 1.0}, {{1, 0}, 1.0}});
  const auto r3 = estimate_mean(ExpSystem{{F3}}, sum_of(L3, {{{0, 1}, 1.0}}), unit_schedule(500.0));
  CHECK(std::abs(r3.rows.back().estimate) <= 0.05);
}

TEST_CASE("estimate_mean preconditions") {
  auto L = lattice_of({{"1"}});
  const ExpSum F = sum_of(L, {{{0}, 1.0}, {{1}, 1.0}});
  CHECK_THROWS_AS(estimate_mean(ExpSystem{{F}}, F, unit_schedule(100.0, 3)), Error);
  auto other = lattice_of({{"1"}, {"sqrt(5)"}});
  CHECK_THROWS_AS(estimate_mean(ExpSystem{{F}}, sum_of(other, {{{0, 1}, 1.0}}), unit_schedule(100.0)), Error);
}

TEST_CASE("compare_prediction examples") {
  CHECK(compare_values(-1.0000003, -1.0, 1e-3).pass);
  CHECK(compare_values(1.414, std::sqrt(2.0), 1e-2).pass);
  const auto c = compare_values(0.3, 0.0, 1e-2);
  CHECK_FALSE(c.pass);
  CHECK(c.extend_lambda);

  auto L = lattice_of({{"1"}});
  const ExpSum F = sum_of(L, {{{0}, 1.0}, {{1}, 1.0}, {{2}, 1.0}});
  const ExpSum G = sum_of(L, {{{1}, 1.0}});
  auto rep = estimate_mean(ExpSystem{{F}}, G, unit_schedule(200.0));
  const auto cmp = compare_prediction(rep, predict_mean(ExpSystem{{F}}, G), 1e-6);
  CHECK(cmp.pass);
  REQUIRE(rep.predicted.has_value());
  CHECK(std::abs(*rep.predicted - Complex(-1.0)) < 1e-12);
  CHECK(*rep.discrepancy < 1e-6);
}

TEST_CASE("mean value is stable under window shifts and shapes") {
  auto L = lattice_of({{"1"}, {"sqrt(2)"}});
  const ExpSum F = sum_of(L, {{{0, 0}, 1.0}, {{1, 0}, Complex(0.5, 0.2)}, {{0, 1}, 0.8}});
  const ExpSum G = sum_of(L, {{{0, 0}, 1.0}, {{1, 0}, 0.3}});
  const ExpSystem S{{F}};
  const auto base = estimate_mean(S, G, unit_schedule(400.0));
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 3; ++trial) {
    WindowSpec W = unit_schedule(400.0);
    W.center = {u(rng)};
    const auto moved = estimate_mean(S, G, W);
    CHECK(std::abs(moved.rows.back().estimate - base.rows.back().estimate) <= std::max(base.diagnostic, moved.diagnostic) + 1e-3);
  }

  auto L2 = lattice_of({{"1", "0"}, {"0", "1"}});
  const ExpSystem axes{{sum_of(L2, {{{0, 0}, 1.0}, {{1, 0}, 1.0}}), sum_of(L2, {{{0, 0}, 1.0}, {{0, 1}, 1.0}})}};
  const ExpSum one = sum_of(L2, {{{0, 0}, 1.0}});
  WindowSpec box = unit_schedule(24.0, 4, 2);
  box.center = {0.013, 0.027};
  WindowSpec ball = box;
  ball.shape = WindowShape::Ball;
  const auto a = estimate_mean(axes, one, box), b = estimate_mean(axes, one, ball);
  CHECK(std::abs(a.extrapolated - b.extrapolated) <= 2.0 * std::max(a.diagnostic, b.diagnostic) + 1e-12);
  CHECK(a.extrapolated.real() == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("dropping a boundary collar changes the mean by O(1/lambda)") {
  auto L = lattice_of({{"1"}, {"sqrt(2)"}});
  const ExpSum F = sum_of(L, {{{0, 0}, 1.0}, {{1, 0}, 1.0}, {{0, 1}, 1.0}});
  const ExpSum G = sum_of(L, {{{0, 0}, 1.0}, {{0, 1}, Complex(0.0, 1.0)}});
  const ExpSystem S{{F}};
  const WindowSpec W = unit_schedule(320.0);
  const auto z = locate_zeros(S, StripBox{strip_radius(S).R, {{-1.0, 321.0}}});
  for (double lambda : W.lambdas()) {
    const Region r = W.at(lambda);
    const Complex full = window_sum(z.zeros, G, r) / r.volume();
    const Complex trimmed = window_sum(z.zeros, G, r.shrunk(1.0)) / r.volume();
    CHECK(std::abs(full - trimmed) * lambda <= 8.0);
  }
}

TEST_CASE("periodic real mean matches the closed form") {
  const auto L = lattice_of({{"1"}});
  const auto lift = build_lift(*L, LiftMode::Real);
  const TrigPoly c1(1, {{parse_frequency({"1"}), 1.0, 0.0}}), s1(1, {{parse_frequency({"1"}), 0.0, 1.0}});
  SemiTrigSet V{1, {{{c1}, {s1}}}};
  const TrigPoly T(1, {{parse_frequency({"0"}), 3.0, 0.0}});
  WindowSpec W = unit_schedule(160.0);
  const auto rep = estimate_mean_real(V, T, W);
  const auto pm = periodic_mean(V, T, lift);
  for (const auto& row : rep.rows) CHECK(row.estimate.real() == doctest::Approx(pm.value).epsilon(1e-12));
  CHECK(rep.diagnostic == doctest::Approx(0.0));
}

TEST_CASE("real means vanish for frequencies outside the clause lattice") {
  // V = {cos 2 pi x + cos 2 pi sqrt(2) x = 1.2}, T = cos 2 pi sqrt(3) x.
  const TrigPoly h(1, {{parse_frequency({"1"}), 1.0, 0.0}, {parse_frequency({"sqrt(2)"}), 1.0, 0.0}, {parse_frequency({"0"}), -1.2, 0.0}});
  SemiTrigSet V{1, {{{h}, {}}}};
  const TrigPoly T(1, {{parse_frequency({"sqrt(3)"}), 1.0, 0.0}});
  const auto rep = estimate_mean_real(V, T, unit_schedule(2000.0));
  CHECK(std::abs(rep.rows.back().estimate) <= 0.05);
}

TEST_CASE("convergence CSV layout") {
  MeanValueReport r;
  r.rows.push_back({10.0, Complex(-10.0), 10.0, Complex(-1.0, 0.5), 10});
  std::ostringstream os;
  write_convergence_csv(os, r);
  CHECK(os.str() == "# schema_version=1 convergence\nlambda,est_re,est_im\n10,-1,0.5\n");
}
