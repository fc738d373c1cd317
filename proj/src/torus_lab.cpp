#include "expsum/torus_lab.hpp"

#include "expsum/error.hpp"
#include "expsum/parallel.hpp"
#include "format.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

namespace expsum {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kSeedOffset = 0.3819660112501051;  // 2 - golden ratio, keeps slices off rational angles

double wrap01(double v) { return v - std::floor(v); }

// Signed distance to the nearest integer translate, in [-1/2, 1/2).
double wrap_half(double v) { return v - std::floor(v + 0.5); }

double refine_root(const std::function<double(double)>& f, double a, double b, double fa, double fb) {
  std::uintmax_t iters = 100;
  const auto r = boost::math::tools::toms748_solve(f, a, b, fa, fb, boost::math::tools::eps_tolerance<double>(52), iters);
  return 0.5 * (r.first + r.second);
}

struct GaussRule {
  std::vector<double> x, w;  // on [-1, 1]
};

const GaussRule& gauss8() {
  static const GaussRule rule = [] {
    using Q = boost::math::quadrature::gauss<double, 8>;
    GaussRule r;
    for (std::size_t i = 0; i < Q::abscissa().size(); ++i) {
      const double a = Q::abscissa()[i], wt = Q::weights()[i];
      r.x.push_back(a);
      r.w.push_back(wt);
      if (a != 0.0) {
        r.x.push_back(-a);
        r.w.push_back(wt);
      }
    }
    return r;
  }();
  return rule;
}

double max_frequency_of(const std::vector<TrigPoly>& ps) {
  double f = 0.0;
  for (const auto& p : ps) f = std::max(f, p.max_frequency());
  return f;
}

}  // namespace

Eigen::VectorXd OrbitLift::angles(const Eigen::VectorXd& x) const {
  Eigen::VectorXd y = phi0 + Phi * x;
  const std::size_t first = mode == LiftMode::Real ? 0 : n;
  for (std::size_t i = first; i < torus_dim; ++i) y(static_cast<Eigen::Index>(i)) = wrap01(y(static_cast<Eigen::Index>(i)));
  return y;
}

OrbitLift build_lift(const FrequencyLattice& L, LiftMode mode, double R, std::int64_t K,
                     std::optional<Eigen::VectorXd> phi0) {
  if (K < 1) fail(ErrorCode::InvalidArgument, "coefficient bound K must be positive");
  OrbitLift out;
  out.mode = mode;
  out.n = L.n();
  out.N = L.rank();
  out.K = K;
  const Eigen::MatrixXd& A = L.basis_matrix();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  lu.setThreshold(1e-12);
  const auto rank = static_cast<std::size_t>(lu.rank());
  out.dense = !has_integral_relation(L, K);
  const auto n = static_cast<Eigen::Index>(out.n), N = static_cast<Eigen::Index>(out.N);
  if (mode == LiftMode::Real) {
    if (rank < out.n)
      fail(ErrorCode::OrbitDegenerate, "orbit has dimension " + std::to_string(rank) + " < n = " +
                                           std::to_string(out.n) + ": no isolated points, mean value 0");
    out.torus_dim = out.N;
    out.orbit_dim = out.n;
    out.Phi = A;
    out.periodic = out.N == out.n;
    out.phi0 = Eigen::VectorXd::Zero(N);
  } else {
    if (!(R > 0)) fail(ErrorCode::InvalidArgument, "complex lift needs a strip radius R > 0");
    if (rank < out.n) fail(ErrorCode::OrbitDegenerate, "complex lift needs frequencies spanning R^n");
    out.R = R;
    out.torus_dim = out.n + out.N;
    out.orbit_dim = 2 * out.n;
    out.Phi = Eigen::MatrixXd::Zero(n + N, 2 * n);
    out.Phi.topLeftCorner(n, n) = Eigen::MatrixXd::Identity(n, n) / (4.0 * R);
    out.Phi.bottomRightCorner(N, n) = A;
    out.phi0 = Eigen::VectorXd::Zero(n + N);
    out.phi0.head(n).setConstant(0.5);
  }
  if (phi0) {
    if (phi0->size() != static_cast<Eigen::Index>(out.torus_dim))
      fail(ErrorCode::InvalidArgument, "base point has the wrong dimension");
    out.phi0 = *phi0;
  }
  return out;
}

TorusTrig::TorusTrig(std::size_t dim, std::vector<TorusTerm> terms) : dim_(dim), terms_(std::move(terms)) {
  for (const auto& t : terms_) {
    if (t.k.size() != dim_) fail(ErrorCode::InvalidArgument, "torus monomial has the wrong dimension");
    if (!std::isfinite(t.c) || !std::isfinite(t.d)) fail(ErrorCode::InvalidArgument, "non-finite coefficient");
  }
}

double TorusTrig::operator()(const Eigen::VectorXd& phi) const {
  double v = 0.0;
  for (const auto& t : terms_) {
    double a = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) a += static_cast<double>(t.k[i]) * phi(static_cast<Eigen::Index>(i));
    a = kTwoPi * wrap_half(a);
    v += t.c * std::cos(a) + t.d * std::sin(a);
  }
  return v;
}

double TorusTrig::value_gradient(const Eigen::VectorXd& phi, Eigen::VectorXd& grad) const {
  grad = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim_));
  double v = 0.0;
  for (const auto& t : terms_) {
    double a = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) a += static_cast<double>(t.k[i]) * phi(static_cast<Eigen::Index>(i));
    a = kTwoPi * wrap_half(a);
    const double c = std::cos(a), s = std::sin(a);
    v += t.c * c + t.d * s;
    const double dv = kTwoPi * (-t.c * s + t.d * c);
    for (std::size_t i = 0; i < dim_; ++i) grad(static_cast<Eigen::Index>(i)) += dv * static_cast<double>(t.k[i]);
  }
  return v;
}

double TorusTrig::integral() const {
  double v = 0.0;
  for (const auto& t : terms_)
    if (std::all_of(t.k.begin(), t.k.end(), [](std::int64_t k) { return k == 0; })) v += t.c;
  return v;
}

double TorusTrig::coefficient_scale() const {
  double s = 0.0;
  for (const auto& t : terms_) s += std::abs(t.c) + std::abs(t.d);
  return s;
}

int TorusTrig::max_order() const {
  std::int64_t m = 0;
  for (const auto& t : terms_)
    for (auto k : t.k) m = std::max(m, std::abs(k));
  return static_cast<int>(m);
}

TrigPoly pull_back(const TorusTrig& f, const FrequencyLattice& L) {
  if (f.dim() != L.rank()) fail(ErrorCode::LatticeMismatch, "torus dimension differs from the lattice rank");
  std::vector<TrigTerm> terms;
  for (const auto& t : f.terms()) {
    TrigTerm tt;
    tt.alpha = L.exact() ? frequency_from_exact(L.exact_frequency_of(t.k)) : frequency_from_real(L.frequency_of(t.k));
    tt.c = t.c;
    tt.d = t.d;
    terms.push_back(std::move(tt));
  }
  return TrigPoly(L.n(), std::move(terms));
}

TorusTrig push_forward(const TrigPoly& T, const FrequencyLattice& L) {
  std::vector<TorusTerm> terms;
  for (const auto& t : T.terms()) {
    auto m = coords_of(t.alpha, L);
    if (!m) fail(ErrorCode::LatticeMismatch, "frequency " + t.alpha.to_string() + " is not in the lattice");
    terms.push_back({*m, t.c, t.d});
  }
  return TorusTrig(L.rank(), std::move(terms));
}

// ---------------------------------------------------------------- Weyl averages

std::vector<WeylRow> orbit_average(const TorusTrig& f, const OrbitLift& lift, const WindowSpec& W) {
  W.validate();
  if (lift.mode != LiftMode::Real || !lift.dense) fail(ErrorCode::InvalidArgument, "orbit_average needs a dense real lift");
  if (f.dim() != lift.torus_dim) fail(ErrorCode::InvalidArgument, "function lives on a torus of another dimension");
  if (W.center.size() != lift.n) fail(ErrorCode::InvalidArgument, "window dimension differs from the orbit dimension");
  const std::size_t n = lift.n;
  if (n > 3 || (n >= 3 && W.shape == WindowShape::Ball))
    fail(ErrorCode::DimensionUnsupported, "orbit_average handles boxes up to n = 3 and balls up to n = 2");

  double rate = 0.0;
  for (const auto& t : f.terms()) {
    Eigen::VectorXd k(static_cast<Eigen::Index>(t.k.size()));
    for (std::size_t i = 0; i < t.k.size(); ++i) k(static_cast<Eigen::Index>(i)) = static_cast<double>(t.k[i]);
    rate = std::max(rate, (lift.Phi.transpose() * k).norm());
  }
  const double h = rate > 0 ? 0.25 / rate : std::numeric_limits<double>::infinity();
  const GaussRule& g = gauss8();
  auto at = [&](const Eigen::VectorXd& x) { return f(lift.phi0 + lift.Phi * x); };

  auto panels = [&](double len) { return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(len / h))); };

  std::vector<WeylRow> rows;
  for (double lambda : W.lambdas()) {
    const Region r = W.at(lambda);
    const auto box = r.bounding_box();
    double integral = 0.0;
    if (r.shape == WindowShape::Box || n == 1) {
      std::vector<std::size_t> np;
      for (const auto& [lo, hi] : box) np.push_back(panels(hi - lo));
      // Outer panels run in parallel; inner dimensions are summed in order.
      std::vector<double> partial(np[0]);
      parallel_for(np[0], [&](std::size_t p0) {
        Eigen::VectorXd x(static_cast<Eigen::Index>(n));
        std::vector<std::size_t> idx(n, 0);
        idx[0] = p0;
        double acc = 0.0;
        std::vector<std::size_t> node(n, 0);
        for (;;) {
          // iterate over inner panel indices idx[1..n) and GL nodes in every dimension
          std::fill(node.begin(), node.end(), 0);
          for (;;) {
            double w = 1.0;
            for (std::size_t d = 0; d < n; ++d) {
              const double hd = (box[d].second - box[d].first) / static_cast<double>(np[d]);
              const double a = box[d].first + hd * static_cast<double>(idx[d]);
              x(static_cast<Eigen::Index>(d)) = a + 0.5 * hd * (g.x[node[d]] + 1.0);
              w *= 0.5 * hd * g.w[node[d]];
            }
            acc += w * at(x);
            std::size_t d = 0;
            while (d < n && ++node[d] == g.x.size()) node[d++] = 0;
            if (d == n) break;
          }
          std::size_t d = 1;
          while (d < n && ++idx[d] == np[d]) idx[d++] = 0;
          if (d >= n) break;
        }
        partial[p0] = acc;
      });
      for (double v : partial) integral += v;
    } else {
      // Ball in the plane: polar coordinates around the center.
      const double rho = r.half.front();
      const std::size_t nr = panels(rho), nt = panels(kTwoPi * rho);
      std::vector<double> partial(nr);
      parallel_for(nr, [&](std::size_t pr) {
        Eigen::VectorXd x(2);
        const double hr = rho / static_cast<double>(nr), ht = kTwoPi / static_cast<double>(nt);
        double acc = 0.0;
        for (std::size_t pt = 0; pt < nt; ++pt)
          for (std::size_t i = 0; i < g.x.size(); ++i)
            for (std::size_t j = 0; j < g.x.size(); ++j) {
              const double rr = hr * (static_cast<double>(pr) + 0.5 * (g.x[i] + 1.0));
              const double th = ht * (static_cast<double>(pt) + 0.5 * (g.x[j] + 1.0));
              x(0) = r.center[0] + rr * std::cos(th);
              x(1) = r.center[1] + rr * std::sin(th);
              acc += 0.25 * hr * ht * g.w[i] * g.w[j] * rr * at(x);
            }
        partial[pr] = acc;
      });
      for (double v : partial) integral += v;
    }
    WeylRow row;
    row.lambda = lambda;
    row.average = integral / r.volume();
    row.exact = f.integral();
    row.abs_err = std::abs(row.average - row.exact);
    rows.push_back(row);
  }
  return rows;
}

void write_weyl_csv(std::ostream& os, const std::vector<WeylRow>& rows) {
  os << "# schema_version=1 weyl\n";
  os << "lambda,avg,exact,abs_err\n";
  for (const auto& r : rows) os << fmt(r.lambda) << "," << fmt(r.average) << "," << fmt(r.exact) << "," << fmt(r.abs_err) << "\n";
}

// ---------------------------------------------------------------- isolated points

namespace {

struct ClauseContext {
  std::vector<const TrigPoly*> eqs;  // nonzero equalities
  const SemiTrigClause* clause = nullptr;
  double period = 1.0;               // shortest period among the clause's equalities
};

double tol_of(const TrigPoly& p, const IsolationOptions& opt) { return opt.tau_res * std::max(1.0, p.coefficient_scale()); }

enum class Verdict { Reject, Accept, Undecided };

Verdict check_constraints(const ClauseContext& cc, const Eigen::VectorXd& x, const IsolationOptions& opt) {
  for (const auto* e : cc.eqs)
    if (std::abs((*e)(x)) > tol_of(*e, opt)) return Verdict::Reject;
  bool undecided = false;
  for (const auto& p : cc.clause->positives) {
    const double v = p(x);
    if (v <= -tol_of(p, opt)) return Verdict::Reject;
    if (v <= tol_of(p, opt)) undecided = true;
  }
  return undecided ? Verdict::Undecided : Verdict::Accept;
}

std::vector<double> candidates_1d(const TrigPoly& E, double lo, double hi, const IsolationOptions& opt) {
  const double h = 1.0 / (static_cast<double>(opt.samples_1d) * E.max_frequency());
  const auto count = static_cast<std::size_t>(std::ceil((hi - lo) / h)) + 3;
  const double start = lo - h;
  const std::size_t chunk = 4096;
  const std::size_t chunks = (count + chunk - 1) / chunk;
  const double tol = tol_of(E, opt);
  std::vector<std::vector<double>> found(chunks);
  parallel_for(chunks, [&](std::size_t c) {
    Eigen::VectorXd x(1), gr(1);
    auto f = [&](double t) {
      x(0) = t;
      return E(x);
    };
    auto df = [&](double t) {
      x(0) = t;
      E.value_gradient(x, gr);
      return gr(0);
    };
    const std::size_t i0 = c * chunk, i1 = std::min(count, i0 + chunk);
    double xa = start + h * static_cast<double>(i0);
    double fa = f(xa), da = df(xa);
    for (std::size_t i = i0; i < i1; ++i) {
      const double xb = start + h * static_cast<double>(i + 1);
      const double fb = f(xb), db = df(xb);
      if (fa == 0.0) found[c].push_back(xa);
      else if ((fa < 0) != (fb < 0) && fb != 0.0) found[c].push_back(refine_root(f, xa, xb, fa, fb));
      // Touching zeros do not change sign; look for them at critical points.
      double crit = std::numeric_limits<double>::quiet_NaN();
      if (da == 0.0) crit = xa;
      else if ((da < 0) != (db < 0) && db != 0.0) crit = refine_root(df, xa, xb, da, db);
      if (!std::isnan(crit) && std::abs(f(crit)) <= tol) found[c].push_back(crit);
      xa = xb;
      fa = fb;
      da = db;
    }
  });
  std::vector<double> out;
  for (auto& v : found) out.insert(out.end(), v.begin(), v.end());
  std::sort(out.begin(), out.end());
  std::vector<double> uniq;
  for (double v : out)
    if (uniq.empty() || v - uniq.back() > 1e-8 * h) uniq.push_back(v);
  return uniq;
}

// Newton on a 2x2 system g(x) = 0 with Jacobian jac(x).
template <class G>
std::optional<Eigen::Vector2d> newton2(G&& g, Eigen::Vector2d x, double step_cap, double tol) {
  for (int it = 0; it < 60; ++it) {
    Eigen::Vector2d v;
    Eigen::Matrix2d J;
    g(x, v, J);
    if (!v.allFinite()) return std::nullopt;
    const double det = J.determinant();
    if (std::abs(det) < 1e-300) return std::nullopt;
    Eigen::Vector2d d = -J.inverse() * v;
    if (d.norm() > step_cap) d *= step_cap / d.norm();
    x += d;
    if (d.norm() <= 1e-15 * (1.0 + x.norm())) break;
  }
  Eigen::Vector2d v;
  Eigen::Matrix2d J;
  g(x, v, J);
  if (v.cwiseAbs().maxCoeff() > tol) return std::nullopt;
  return x;
}

std::vector<Eigen::Vector2d> dedupe_2d(std::vector<Eigen::Vector2d> pts, double tol) {
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a(0) != b(0) ? a(0) < b(0) : a(1) < b(1); });
  std::vector<Eigen::Vector2d> out;
  std::map<std::pair<std::int64_t, std::int64_t>, std::vector<std::size_t>> grid;
  for (const auto& p : pts) {
    const auto cx = static_cast<std::int64_t>(std::floor(p(0) / tol)), cy = static_cast<std::int64_t>(std::floor(p(1) / tol));
    bool dup = false;
    for (std::int64_t dx = -1; dx <= 1 && !dup; ++dx)
      for (std::int64_t dy = -1; dy <= 1 && !dup; ++dy) {
        auto it = grid.find({cx + dx, cy + dy});
        if (it == grid.end()) continue;
        for (auto idx : it->second) dup = dup || (out[idx] - p).norm() < tol;
      }
    if (dup) continue;
    grid[{cx, cy}].push_back(out.size());
    out.push_back(p);
  }
  return out;
}

void clause_points_1d(const ClauseContext& cc, const TrigPoly& T, const Region& W, const IsolationOptions& opt,
                      IsolatedPointSet& out) {
  const TrigPoly& E = *cc.eqs.front();
  const auto box = W.bounding_box();
  const double tau = opt.tau_iso * cc.period;
  Eigen::VectorXd x(1);
  for (double c : candidates_1d(E, box[0].first, box[0].second, opt)) {
    x(0) = c;
    if (!W.contains(x)) continue;
    Verdict v = check_constraints(cc, x, opt);
    if (v == Verdict::Reject) continue;
    for (double s : {-tau, tau}) {
      Eigen::VectorXd y(1);
      y(0) = c + s;
      if (std::abs(E(y)) <= tol_of(E, opt)) v = Verdict::Undecided;
    }
    (v == Verdict::Accept ? out.points : out.undecided).push_back({x, T(x)});
  }
}

void clause_points_2d(const ClauseContext& cc, const TrigPoly& T, const Region& W, const IsolationOptions& opt,
                      IsolatedPointSet& out) {
  const auto box = W.bounding_box();
  const double h = cc.period / static_cast<double>(opt.samples_2d);
  const auto nx = static_cast<std::size_t>(std::ceil((box[0].second - box[0].first) / h)) + 3;
  const auto ny = static_cast<std::size_t>(std::ceil((box[1].second - box[1].first) / h)) + 3;
  const bool system = cc.eqs.size() >= 2;
  const TrigPoly& E1 = *cc.eqs[0];
  const TrigPoly* E2 = system ? cc.eqs[1] : nullptr;
  const double s1 = std::max(1.0, E1.coefficient_scale()), s2 = E2 ? std::max(1.0, E2->coefficient_scale()) : 1.0;

  // For one equation the isolated zeros are critical points of E1 with E1 = 0.
  auto g = [&](const Eigen::Vector2d& p, Eigen::Vector2d& v, Eigen::Matrix2d& J) {
    Eigen::VectorXd x = p, gr;
    if (system) {
      v(0) = E1.value_gradient(x, gr) / s1;
      J.row(0) = gr.transpose() / s1;
      v(1) = E2->value_gradient(x, gr) / s2;
      J.row(1) = gr.transpose() / s2;
    } else {
      Eigen::MatrixXd H;
      E1.value_gradient_hessian(x, gr, H);
      v = gr / s1;
      J = H / s1;
    }
  };
  std::vector<std::vector<Eigen::Vector2d>> found(nx);
  parallel_for(nx, [&](std::size_t i) {
    for (std::size_t j = 0; j < ny; ++j) {
      const Eigen::Vector2d seed(box[0].first + h * (static_cast<double>(i) - 1.0),
                                 box[1].first + h * (static_cast<double>(j) - 1.0));
      if (auto p = newton2(g, seed, h, system ? opt.tau_res : 1e-9)) {
        if (!W.contains(*p)) continue;
        if (!system && std::abs(E1(*p)) > tol_of(E1, opt)) continue;
        found[i].push_back(*p);
      }
    }
  });
  std::vector<Eigen::Vector2d> all;
  for (auto& f : found) all.insert(all.end(), f.begin(), f.end());
  const double tau = opt.tau_iso * cc.period;
  for (const auto& p : dedupe_2d(std::move(all), 1e-7 * cc.period)) {
    Eigen::VectorXd x = p;
    Verdict v = check_constraints(cc, x, opt);
    if (v == Verdict::Reject) continue;
    if (system) {
      Eigen::Vector2d val;
      Eigen::Matrix2d J;
      g(p, val, J);
      Eigen::JacobiSVD<Eigen::Matrix2d> svd(J);
      const auto& sv = svd.singularValues();
      if (!(sv(1) > 1e-8 * sv(0))) v = Verdict::Undecided;
    } else {
      // Local sign analysis: an isolated zero of one equation is a strict extremum.
      int pos = 0, neg = 0, tiny = 0;
      for (int k = 0; k < 32; ++k) {
        const double th = kTwoPi * k / 32.0;
        Eigen::VectorXd y = x;
        y(0) += tau * std::cos(th);
        y(1) += tau * std::sin(th);
        const double e = E1(y);
        if (std::abs(e) <= tol_of(E1, opt)) ++tiny;
        else (e > 0 ? pos : neg)++;
      }
      if (pos > 0 && neg > 0) continue;  // the zero set passes through: a curve point
      if (tiny > 0) v = Verdict::Undecided;
    }
    (v == Verdict::Accept ? out.points : out.undecided).push_back({x, T(x)});
  }
}

bool lex_less(const IsolatedPoint& a, const IsolatedPoint& b) {
  for (Eigen::Index k = 0; k < a.x.size(); ++k)
    if (a.x(k) != b.x(k)) return a.x(k) < b.x(k);
  return false;
}

void unique_points(std::vector<IsolatedPoint>& v, double tol) {
  std::sort(v.begin(), v.end(), lex_less);
  std::vector<IsolatedPoint> out;
  for (auto& p : v) {
    bool dup = false;
    for (auto it = out.rbegin(); it != out.rend() && p.x(0) - it->x(0) <= tol; ++it) dup = dup || (it->x - p.x).norm() <= tol;
    if (!dup) out.push_back(std::move(p));
  }
  v = std::move(out);
}

}  // namespace

IsolatedPointSet isolated_points(const SemiTrigSet& V, const TrigPoly& T, const Region& W, const IsolationOptions& opt) {
  if (V.n == 0 || V.n > 2) fail(ErrorCode::DimensionUnsupported, "isolated_points handles n = 1 and n = 2");
  if (W.dim() != V.n) fail(ErrorCode::InvalidArgument, "window dimension differs from the set");
  if (T.n() != V.n && !T.is_zero()) fail(ErrorCode::InvalidArgument, "weight has the wrong dimension");
  IsolatedPointSet out;
  double period = std::numeric_limits<double>::infinity();
  for (const auto& cl : V.clauses) {
    ClauseContext cc;
    cc.clause = &cl;
    for (const auto& e : cl.equalities) {
      if (e.n() != V.n) fail(ErrorCode::InvalidArgument, "clause polynomial has the wrong dimension");
      if (e.coefficient_scale() > 0) cc.eqs.push_back(&e);
    }
    for (const auto& p : cl.positives)
      if (p.n() != V.n) fail(ErrorCode::InvalidArgument, "clause polynomial has the wrong dimension");
    if (cc.eqs.empty()) continue;  // open set: nothing isolated
    // A constant nonzero equation has no solutions.
    bool impossible = false;
    for (const auto* e : cc.eqs) impossible = impossible || e->max_frequency() == 0.0;
    if (impossible) continue;
    std::vector<TrigPoly> eqs;
    for (const auto* e : cc.eqs) eqs.push_back(*e);
    cc.period = 1.0 / max_frequency_of(eqs);
    period = std::min(period, cc.period);
    if (V.n == 1) clause_points_1d(cc, T, W, opt, out);
    else clause_points_2d(cc, T, W, opt, out);
  }
  const double tol = std::isfinite(period) ? 1e-7 * period : 1e-12;
  unique_points(out.points, tol);
  unique_points(out.undecided, tol);
  return out;
}

PeriodicMean periodic_mean(const SemiTrigSet& V, const TrigPoly& T, const OrbitLift& lift, const IsolationOptions& opt) {
  if (lift.mode != LiftMode::Real || !lift.periodic) fail(ErrorCode::InvalidArgument, "closed form needs a periodic lift (N = n)");
  const std::size_t n = lift.n;
  const Eigen::MatrixXd inv = lift.Phi.inverse();
  // Bounding box of the fundamental cell inv * [0,1]^n.
  std::vector<double> lo(n, std::numeric_limits<double>::infinity()), hi(n, -std::numeric_limits<double>::infinity());
  for (std::size_t corner = 0; corner < (std::size_t{1} << n); ++corner) {
    Eigen::VectorXd u(static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k < n; ++k) u(static_cast<Eigen::Index>(k)) = (corner >> k) & 1 ? 1.0 : 0.0;
    const Eigen::VectorXd x = inv * u;
    for (std::size_t k = 0; k < n; ++k) {
      lo[k] = std::min(lo[k], x(static_cast<Eigen::Index>(k)));
      hi[k] = std::max(hi[k], x(static_cast<Eigen::Index>(k)));
    }
  }
  Region box;
  for (std::size_t k = 0; k < n; ++k) {
    const double pad = 1e-3 * (hi[k] - lo[k]);
    box.center.push_back(0.5 * (lo[k] + hi[k]));
    box.half.push_back(0.5 * (hi[k] - lo[k]) + pad);
  }
  const auto found = isolated_points(V, T, box, opt);
  auto in_cell = [&](const Eigen::VectorXd& x) {
    const Eigen::VectorXd phi = lift.Phi * x;
    for (Eigen::Index k = 0; k < phi.size(); ++k)
      if (phi(k) < 0.0 || phi(k) >= 1.0) return false;
    return true;
  };
  for (const auto& p : found.undecided)
    if (in_cell(p.x)) fail(ErrorCode::IsolationUndecided, "a point in the fundamental cell failed the isolation test");
  PeriodicMean out;
  const double det = std::abs(lift.Phi.determinant());
  out.cell_volume = 1.0 / det;
  double sum = 0.0;
  std::vector<Eigen::VectorXd> seen;
  for (const auto& p : found.points) {
    if (!in_cell(p.x)) continue;
    const Eigen::VectorXd phi = lift.Phi * p.x;
    bool dup = false;
    for (const auto& q : seen) {
      double d = 0.0;
      for (Eigen::Index k = 0; k < phi.size(); ++k) d = std::max(d, std::abs(wrap_half(phi(k) - q(k))));
      dup = dup || d < 1e-9;
    }
    if (dup) continue;
    seen.push_back(phi);
    sum += p.value;
  }
  out.points = seen.size();
  out.value = sum * det;
  return out;
}

// ---------------------------------------------------------------- transversal volume

namespace {

struct CurveModel {
  const TorusSet& V;
  const TorusTrig& T;
  std::size_t N;
  Eigen::MatrixXd A;       // N x n orbit directions
  Eigen::MatrixXd Q;       // orthonormal basis of span(A)
  std::vector<double> scale;
  double tangency;

  // Equation values and Jacobian ((N-1) x N), scaled.
  void equations(const Eigen::VectorXd& phi, Eigen::VectorXd& h, Eigen::MatrixXd& J) const {
    h.resize(static_cast<Eigen::Index>(N - 1));
    J.resize(static_cast<Eigen::Index>(N - 1), static_cast<Eigen::Index>(N));
    Eigen::VectorXd g;
    for (std::size_t j = 0; j + 1 < N; ++j) {
      h(static_cast<Eigen::Index>(j)) = V.equalities[j].value_gradient(phi, g) / scale[j];
      J.row(static_cast<Eigen::Index>(j)) = g.transpose() / scale[j];
    }
  }

  Eigen::VectorXd raw_tangent(const Eigen::MatrixXd& J) const {
    Eigen::VectorXd t(static_cast<Eigen::Index>(N));
    if (N == 2) {
      t << -J(0, 1), J(0, 0);
    } else {
      const Eigen::Vector3d a = J.row(0).transpose(), b = J.row(1).transpose();
      t = a.cross(b);
    }
    return t;
  }

  Eigen::VectorXd tangent(const Eigen::VectorXd& phi) const {
    Eigen::VectorXd h;
    Eigen::MatrixXd J;
    equations(phi, h, J);
    Eigen::VectorXd t = raw_tangent(J);
    const double norm = t.norm();
    if (!(norm > 1e-8)) fail(ErrorCode::TracingStalled, "singular point on the level set");
    return t / norm;
  }

  // Newton projection onto the level set.
  bool correct(Eigen::VectorXd& phi, int& iters) const {
    Eigen::VectorXd h;
    Eigen::MatrixXd J;
    for (iters = 0; iters < 8; ++iters) {
      equations(phi, h, J);
      if (h.cwiseAbs().maxCoeff() <= 1e-14) return true;
      const Eigen::MatrixXd JJt = J * J.transpose();
      const Eigen::VectorXd d = J.transpose() * JJt.ldlt().solve(h);
      if (!d.allFinite()) return false;
      phi -= d;
    }
    equations(phi, h, J);
    return h.cwiseAbs().maxCoeff() <= 1e-12;
  }

  // |omega(t)| with the tangency exclusion.
  double density(const Eigen::VectorXd& t, bool& excluded) const {
    excluded = (Q.transpose() * t).norm() > 1.0 - tangency;
    if (excluded) return 0.0;
    Eigen::MatrixXd M(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
    M.col(0) = t;
    M.rightCols(static_cast<Eigen::Index>(N - 1)) = A;
    return std::abs(M.determinant());
  }

  // Fraction [t0, t1] of the chord p -> q on which every positivity constraint holds (linearized).
  std::pair<double, double> admissible(const Eigen::VectorXd& p, const Eigen::VectorXd& q) const {
    double t0 = 0.0, t1 = 1.0;
    for (const auto& P : V.positives) {
      const double a = P(p), b = P(q);
      if (a <= 0 && b <= 0) return {0.0, 0.0};
      if (a > 0 && b > 0) continue;
      const double s = a / (a - b);
      if (a > 0) t1 = std::min(t1, s);
      else t0 = std::max(t0, s);
    }
    return {t0, std::max(t0, t1)};
  }
};

std::vector<Eigen::VectorXd> curve_seeds(const CurveModel& m, std::size_t lines, int order) {
  const std::size_t N = m.N;
  std::vector<std::vector<Eigen::VectorXd>> per(N * lines);
  parallel_for(N * lines, [&](std::size_t job) {
    const std::size_t axis = job / lines, j = job % lines;
    const double c = (static_cast<double>(j) + kSeedOffset) / static_cast<double>(lines);
    if (N == 2) {
      const std::size_t free = 1 - axis;
      const auto samples = static_cast<std::size_t>(std::max(64, 32 * order));
      Eigen::VectorXd phi(2);
      phi(static_cast<Eigen::Index>(axis)) = c;
      auto f = [&](double u) {
        phi(static_cast<Eigen::Index>(free)) = u;
        return m.V.equalities[0](phi);
      };
      const double f0 = f(0.0);
      double ua = 0.0, fa = f0;
      for (std::size_t i = 1; i <= samples; ++i) {
        const double ub = static_cast<double>(i) / static_cast<double>(samples);
        const double fb = i == samples ? f0 : f(ub);  // u = 1 is u = 0 on the circle
        if (fa == 0.0) {
          phi(static_cast<Eigen::Index>(free)) = ua;
          per[job].push_back(phi);
        } else if ((fa < 0) != (fb < 0) && fb != 0.0 && fa != 0.0) {
          phi(static_cast<Eigen::Index>(free)) = refine_root(f, ua, ub, fa, fb);
          per[job].push_back(phi);
        }
        ua = ub;
        fa = fb;
      }
    } else {
      const std::size_t u = (axis + 1) % 3, v = (axis + 2) % 3;
      const auto grid = static_cast<std::size_t>(std::max(16, 8 * order));
      std::vector<Eigen::Vector2d> pts;
      auto g = [&](const Eigen::Vector2d& p, Eigen::Vector2d& val, Eigen::Matrix2d& J) {
        Eigen::VectorXd phi(3), h;
        Eigen::MatrixXd JJ;
        phi(static_cast<Eigen::Index>(axis)) = c;
        phi(static_cast<Eigen::Index>(u)) = p(0);
        phi(static_cast<Eigen::Index>(v)) = p(1);
        m.equations(phi, h, JJ);
        val = h;
        J.col(0) = JJ.col(static_cast<Eigen::Index>(u));
        J.col(1) = JJ.col(static_cast<Eigen::Index>(v));
      };
      const double hstep = 1.0 / static_cast<double>(grid);
      for (std::size_t a = 0; a < grid; ++a)
        for (std::size_t b = 0; b < grid; ++b)
          if (auto p = newton2(g, Eigen::Vector2d((a + 0.5) * hstep, (b + 0.5) * hstep), hstep, 1e-12))
            pts.emplace_back(wrap01((*p)(0)), wrap01((*p)(1)));
      for (const auto& p : dedupe_2d(std::move(pts), 1e-9)) {
        Eigen::VectorXd phi(3);
        phi(static_cast<Eigen::Index>(axis)) = c;
        phi(static_cast<Eigen::Index>(u)) = p(0);
        phi(static_cast<Eigen::Index>(v)) = p(1);
        per[job].push_back(phi);
      }
    }
  });
  std::vector<Eigen::VectorXd> out;
  for (auto& s : per) out.insert(out.end(), s.begin(), s.end());
  return out;
}

Eigen::VectorXd wrapped_delta(const Eigen::VectorXd& to, const Eigen::VectorXd& from) {
  Eigen::VectorXd d = to - from;
  for (Eigen::Index k = 0; k < d.size(); ++k) d(k) = wrap_half(d(k));
  return d;
}

}  // namespace

TransversalResult transversal_volume_curve(const TorusSet& V, const TorusTrig& T, const OrbitLift& lift,
                                           const TransversalOptions& opt) {
  if (lift.mode != LiftMode::Real) fail(ErrorCode::InvalidArgument, "transversal volume needs a real lift");
  if (lift.N != lift.n + 1) fail(ErrorCode::DimensionUnsupported, "transversal volume handles N - n = 1 only");
  if (lift.N != 2 && lift.N != 3) fail(ErrorCode::DimensionUnsupported, "curve tracing handles tori of dimension 2 and 3");
  if (V.N != lift.N || V.equalities.size() != lift.N - 1)
    fail(ErrorCode::InvalidArgument, "the set needs N - n equations on the lift's torus");
  for (const auto& e : V.equalities)
    if (e.dim() != V.N) fail(ErrorCode::InvalidArgument, "equation lives on a torus of another dimension");
  for (const auto& p : V.positives)
    if (p.dim() != V.N) fail(ErrorCode::InvalidArgument, "constraint lives on a torus of another dimension");
  if (T.dim() != V.N) fail(ErrorCode::InvalidArgument, "weight lives on a torus of another dimension");

  CurveModel m{V, T, V.N, lift.Phi, {}, {}, opt.tangency};
  m.Q = Eigen::HouseholderQR<Eigen::MatrixXd>(m.A).householderQ() *
        Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(V.N), static_cast<Eigen::Index>(lift.n));
  int order = 1;
  for (const auto& e : V.equalities) {
    const double s = e.coefficient_scale();
    if (!(s > 0)) fail(ErrorCode::TracingStalled, "an equation vanishes identically");
    m.scale.push_back(s);
    order = std::max(order, e.max_order());
  }
  const std::size_t lines = opt.seed_lines > 0 ? opt.seed_lines : static_cast<std::size_t>(std::max(8, 4 * order));
  const auto seeds = curve_seeds(m, lines, order);
  std::vector<bool> visited(seeds.size(), false);

  TransversalResult out;
  auto integrand = [&](const Eigen::VectorXd& phi, const Eigen::VectorXd& t, bool& excluded) {
    const double w = m.density(t, excluded);
    return std::pair<double, double>(w, w == 0.0 ? 0.0 : T(phi) * w);
  };
  auto record = [&](std::size_t comp, const Eigen::VectorXd& phi, double w, double g) {
    CurveSample s;
    s.component = comp;
    s.phi = phi;
    for (Eigen::Index k = 0; k < s.phi.size(); ++k) s.phi(k) = wrap01(s.phi(k));
    s.density = w;
    s.integrand = g;
    out.samples.push_back(std::move(s));
  };
  auto mark = [&](const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
    const Eigen::VectorXd seg = q - p;
    const double len2 = seg.squaredNorm();
    const double tol = 0.02 * std::sqrt(len2) + 1e-7;
    for (std::size_t j = 0; j < seeds.size(); ++j) {
      if (visited[j]) continue;
      const Eigen::VectorXd d = wrapped_delta(seeds[j], p);
      const double s = len2 > 0 ? std::clamp(d.dot(seg) / len2, 0.0, 1.0) : 0.0;
      if ((d - s * seg).norm() < tol) visited[j] = true;
    }
  };

  for (std::size_t s0 = 0; s0 < seeds.size(); ++s0) {
    if (visited[s0]) continue;
    visited[s0] = true;
    const std::size_t comp = out.components++;
    Eigen::VectorXd start = seeds[s0];
    int iters = 0;
    if (!m.correct(start, iters)) fail(ErrorCode::TracingStalled, "seed did not project onto the level set");
    Eigen::VectorXd phi = start;
    Eigen::VectorXd t = m.tangent(phi);
    bool excl = false;
    auto [w, g] = integrand(phi, t, excl);
    out.excluded += excl;
    record(comp, phi, w, g);
    double step = opt.max_step, arc = 0.0;
    std::size_t steps = 0;
    for (;;) {
      if (++steps > 50'000'000) fail(ErrorCode::TracingStalled, "curve did not close");
      const Eigen::VectorXd to_start = wrapped_delta(start, phi);
      const bool closing = arc > 4.0 * opt.max_step && to_start.norm() <= step && to_start.dot(t) > 0;
      Eigen::VectorXd q;
      Eigen::VectorXd tq;
      if (closing) {
        q = phi + to_start;
        tq = m.tangent(q);
        if (tq.dot(t) < 0) tq = -tq;
      } else {
        Eigen::VectorXd t2 = m.tangent(phi + 0.5 * step * t);
        if (t2.dot(t) < 0) t2 = -t2;
        q = phi + step * t2;
        const bool ok = m.correct(q, iters);
        const double moved = (q - (phi + step * t2)).norm();
        bool accept = ok && iters <= 5 && moved <= 0.1 * step;
        if (accept) {
          tq = m.tangent(q);
          if (tq.dot(t2) < 0) tq = -tq;
          accept = tq.dot(t) > std::cos(0.05);
        }
        if (!accept) {
          step *= 0.5;
          if (step < opt.min_step) fail(ErrorCode::TracingStalled, "step size underflow while tracing the level set");
          continue;
        }
      }
      const auto [wq, gq] = integrand(q, tq, excl);
      out.excluded += excl;
      const double len = (q - phi).norm();
      const auto [a, b] = m.admissible(phi, q);
      if (b > a) {
        const double ga = g + a * (gq - g), gb = g + b * (gq - g);
        out.value += len * (b - a) * 0.5 * (ga + gb);
      }
      out.length += len;
      arc += len;
      mark(phi, q);
      if (closing) break;
      record(comp, q, wq, gq);
      phi = q;
      t = tq;
      g = gq;
      step = std::min(opt.max_step, 1.5 * step);
    }
  }
  return out;
}

void write_curve_csv(std::ostream& os, const TransversalResult& r) {
  os << "# schema_version=1 curve\n";
  os << "component";
  const std::size_t N = r.samples.empty() ? 0 : static_cast<std::size_t>(r.samples.front().phi.size());
  for (std::size_t k = 1; k <= N; ++k) os << ",phi_" << k;
  os << ",density,integrand\n";
  for (const auto& s : r.samples) {
    os << s.component;
    for (Eigen::Index k = 0; k < s.phi.size(); ++k) os << "," << fmt(s.phi(k));
    os << "," << fmt(s.density) << "," << fmt(s.integrand) << "\n";
  }
}

}  // namespace expsum
