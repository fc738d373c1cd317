#include "expsum/zero_finder.hpp"

#include "expsum/error.hpp"
#include "format.hpp"
#include "expsum/newton_geometry.hpp"
#include "expsum/parallel.hpp"

#include <boost/random/sobol.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>

namespace expsum {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kGolden = 0.6180339887498949;

std::vector<CompiledExpSum> compile(const ExpSystem& S) {
  std::vector<CompiledExpSum> out;
  for (const auto& F : S.components) out.emplace_back(F);
  return out;
}

// Sum of |c_k| exp(2 pi alpha_k . x): the size F would have without cancellation.
double term_scale(const CompiledExpSum& F, const Eigen::VectorXd& x) {
  double s = 0.0;
  for (std::size_t t = 0; t < F.size(); ++t)
    s += std::abs(F.coefficients()[t]) * std::exp(kTwoPi * F.frequencies().row(static_cast<Eigen::Index>(t)).dot(x));
  return s;
}

double term_scale_1d(const CompiledExpSum& F, double re) { return term_scale(F, Eigen::VectorXd::Constant(1, re)); }

// Some term of some component outweighs all other terms of that component.
bool dominated(const std::vector<CompiledExpSum>& sys, const Eigen::VectorXd& x) {
  for (const auto& F : sys) {
    double total = 0.0, best = 0.0;
    for (std::size_t t = 0; t < F.size(); ++t) {
      const double m =
          std::abs(F.coefficients()[t]) * std::exp(kTwoPi * F.frequencies().row(static_cast<Eigen::Index>(t)).dot(x));
      total += m;
      best = std::max(best, m);
    }
    if (best > (total - best) * (1.0 + 1e-12)) return true;
  }
  return false;
}

std::vector<Eigen::VectorXd> directions(std::size_t n, std::size_t count, double offset) {
  std::vector<Eigen::VectorXd> out;
  if (n == 1) {
    out.push_back(Eigen::VectorXd::Constant(1, 1.0));
    out.push_back(Eigen::VectorXd::Constant(1, -1.0));
  } else if (n == 2) {
    for (std::size_t k = 0; k < count; ++k) {
      const double a = kTwoPi * (static_cast<double>(k) + offset) / static_cast<double>(count);
      Eigen::VectorXd u(2);
      u << std::cos(a), std::sin(a);
      out.push_back(u);
    }
  } else {
    // Fibonacci lattice on S^2, embedded in the first three coordinates for n = 3.
    for (std::size_t k = 0; k < count; ++k) {
      const double zc = 1.0 - 2.0 * (static_cast<double>(k) + 0.5) / static_cast<double>(count);
      const double r = std::sqrt(std::max(0.0, 1.0 - zc * zc));
      const double a = kTwoPi * (static_cast<double>(k) * kGolden + offset);
      Eigen::VectorXd u = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
      u(0) = r * std::cos(a);
      u(1) = r * std::sin(a);
      u(2) = zc;
      out.push_back(u);
    }
  }
  return out;
}

// Smallest t >= 0 beyond which, along direction u, one component is
// dominated by the term that maximizes alpha . u. Infinity if none.
double certified_radius(const std::vector<CompiledExpSum>& sys, const Eigen::VectorXd& u, double r_max) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& F : sys) {
    const Eigen::VectorXd s = F.frequencies() * u;
    Eigen::Index v = 0;
    for (Eigen::Index k = 1; k < s.size(); ++k)
      if (s(k) > s(v)) v = k;
    bool unique = true;
    for (Eigen::Index k = 0; k < s.size(); ++k)
      if (k != v && s(v) - s(k) <= 1e-12 * (1.0 + std::abs(s(v)))) unique = false;
    if (!unique) continue;
    const double cv = std::abs(F.coefficients()[static_cast<std::size_t>(v)]);
    auto g = [&](double t) {
      double acc = 0.0;
      for (Eigen::Index k = 0; k < s.size(); ++k)
        if (k != v) acc += std::abs(F.coefficients()[static_cast<std::size_t>(k)]) * std::exp(-kTwoPi * (s(v) - s(k)) * t);
      return acc - cv;
    };
    if (g(0.0) < 0.0) return 0.0;
    if (g(r_max) >= 0.0) continue;
    double lo = 0.0, hi = r_max;
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo + hi);
      (g(mid) < 0.0 ? hi : lo) = mid;
    }
    best = std::min(best, hi);
  }
  return best;
}

// Winding machinery for one variable.
class Contour {
 public:
  Contour(const CompiledExpSum& F, const ZeroFinderOptions& opt) : F_(F), opt_(opt) {}

  Complex value(Complex z) const {
    const Complex zz[1] = {z};
    return F_(zz);
  }

  // Argument change of F along the segment p -> q.
  double arg_change(Complex p, Complex q) const {
    const Complex fp = value(p), fq = value(q);
    check(p, fp);
    check(q, fq);
    return segment(p, q, fp, fq, 0);
  }

  int winding(const Rect& r) const {
    const Complex a(r.re_lo, r.im_lo), b(r.re_hi, r.im_lo), c(r.re_hi, r.im_hi), d(r.re_lo, r.im_hi);
    const double total = arg_change(a, b) + arg_change(b, c) + arg_change(c, d) + arg_change(d, a);
    const double w = total / kTwoPi;
    const double rounded = std::round(w);
    if (std::abs(w - rounded) > 1e-3) fail(ErrorCode::Internal, "winding number did not close: " + fmt(w));
    return static_cast<int>(rounded);
  }

 private:
  void check(Complex z, Complex fz) const {
    if (std::abs(fz) <= opt_.tau_bdry * term_scale_1d(F_, z.real()))
      fail(ErrorCode::BoundaryZero, "F vanishes on the contour near " + fmt(z.real()) + (z.imag() < 0 ? "" : "+") +
                                        fmt(z.imag()) + "i");
  }

  // Sum |c| (2 pi a)^2 exp(2 pi a x) maximized over re_lo <= x <= re_hi: bounds |F''| there.
  double second_bound(double re_lo, double re_hi) const {
    double b = 0.0;
    for (std::size_t t = 0; t < F_.size(); ++t) {
      const double a = F_.frequencies()(static_cast<Eigen::Index>(t), 0);
      b += std::abs(F_.coefficients()[t]) * kTwoPi * kTwoPi * a * a * std::exp(kTwoPi * std::max(a * re_lo, a * re_hi));
    }
    return b;
  }

  // Accepts the chord when F stays inside a disc around an endpoint value that excludes 0.
  double segment(Complex p, Complex q, Complex fp, Complex fq, int depth) const {
    const double re[2] = {std::min(p.real(), q.real()), std::max(p.real(), q.real())};
    const double h = std::abs(q - p), top = std::max(std::abs(fp), std::abs(fq));
    const double L = F_.derivative_bound(std::span<const double>(re, 1), std::span<const double>(re + 1, 1));
    if (L * h < top) return std::arg(fq / fp);
    // Near multiple zeros the global bound is far too pessimistic; use |F'(m)| + (h/2) max|F''|.
    const Complex m = 0.5 * (p + q);
    const Complex mm[1] = {m};
    Complex dm[1];
    const Complex fm = F_.value_and_gradient(mm, dm);
    const double local = std::abs(dm[0]) + 0.5 * h * second_bound(re[0], re[1]);
    if (local * h < top) return std::arg(fq / fp);
    if (depth > 60) fail(ErrorCode::BoundaryZero, "contour refinement did not separate F from zero");
    check(m, fm);
    return segment(p, m, fp, fm, depth + 1) + segment(m, q, fm, fq, depth + 1);
  }

  const CompiledExpSum& F_;
  const ZeroFinderOptions& opt_;
};

struct Isolator {
  const ExpSum& source;
  const CompiledExpSum& F;
  const Contour& contour;
  const ZeroFinderOptions& opt;
  double cluster_size;
  std::vector<ZeroRecord> found;
  std::map<int, CompiledExpSum> derivs;

  // A zero of multiplicity m is a simple zero of F^(m-1); Newton there reaches full precision.
  Complex polish(Complex z, int m) {
    if (m < 2) return z;
    auto it = derivs.find(m - 1);
    if (it == derivs.end()) {
      ExpSum D = source;
      for (int k = 0; k < m - 1; ++k) D = D.derivative(0);
      it = derivs.emplace(m - 1, CompiledExpSum(D)).first;
    }
    const CompiledExpSum& D = it->second;
    Complex w = z;
    for (int k = 0; k < 30; ++k) {
      const Complex ww[1] = {w};
      Complex g[1];
      const Complex f = D.value_and_gradient(ww, g);
      if (g[0] == Complex(0.0)) break;
      const Complex step = f / g[0];
      w -= step;
      if (std::abs(step) <= 1e-16 * (1.0 + std::abs(w))) break;
    }
    return std::abs(w - z) <= cluster_size ? w : z;
  }

  std::optional<Complex> newton(Complex z, int m, const Rect& r) const {
    const double diam = std::hypot(r.re_hi - r.re_lo, r.im_hi - r.im_lo);
    for (int it = 0; it < 100; ++it) {
      const Complex zz[1] = {z};
      Complex g[1];
      const Complex f = F.value_and_gradient(zz, g);
      if (f == Complex(0.0)) return z;
      if (g[0] == Complex(0.0)) return std::nullopt;
      Complex step = static_cast<double>(m) * f / g[0];
      if (std::abs(step) > diam) step *= diam / std::abs(step);
      z -= step;
      if (std::abs(step) <= 1e-15 * (1.0 + std::abs(z))) break;
    }
    const double slack = 1e-9 * (1.0 + diam);
    if (z.real() < r.re_lo - slack || z.real() > r.re_hi + slack || z.imag() < r.im_lo - slack ||
        z.imag() > r.im_hi + slack)
      return std::nullopt;
    return z;
  }

  void record(Complex z, int m) {
    z = polish(z, m);
    ZeroRecord rec;
    rec.z = {z};
    rec.multiplicity = m;
    const Complex zz[1] = {z};
    Complex g[1];
    rec.residual = std::abs(F.value_and_gradient(zz, g));
    rec.jacobian_condition = 1.0;
    found.push_back(rec);
  }

  // Splits r along its longer side; the split line is nudged off zeros.
  std::pair<Rect, Rect> split(const Rect& r, int& left_count) const {
    const bool vertical = (r.re_hi - r.re_lo) >= (r.im_hi - r.im_lo);
    for (int j = 0; j < 32; ++j) {
      const double frac = j == 0 ? 0.5 : 0.5 + 0.25 * (std::fmod(j * kGolden, 1.0) - 0.5);
      Rect a = r, b = r;
      if (vertical) {
        const double x = r.re_lo + frac * (r.re_hi - r.re_lo);
        a.re_hi = x;
        b.re_lo = x;
      } else {
        const double y = r.im_lo + frac * (r.im_hi - r.im_lo);
        a.im_hi = y;
        b.im_lo = y;
      }
      try {
        left_count = contour.winding(a);
        return {a, b};
      } catch (const Error& e) {
        if (e.code() != ErrorCode::BoundaryZero) throw;
      }
    }
    fail(ErrorCode::BoundaryZero, "could not place a zero-free split line");
  }

  void isolate(const Rect& r, int count, int depth) {
    if (count <= 0) return;
    const Complex center(0.5 * (r.re_lo + r.re_hi), 0.5 * (r.im_lo + r.im_hi));
    const double diam = std::hypot(r.re_hi - r.re_lo, r.im_hi - r.im_lo);
    if (count >= 2 && diam > cluster_size) {
      // A multiple zero never separates under splitting; confirm it with a small square instead.
      if (auto z = newton(center, count, r)) {
        const double rho = cluster_size;
        const Rect sq{z->real() - rho, z->real() + rho, z->imag() - rho, z->imag() + rho};
        const bool contained = sq.re_lo > r.re_lo && sq.re_hi < r.re_hi && sq.im_lo > r.im_lo && sq.im_hi < r.im_hi;
        if (contained) {
          try {
            if (contour.winding(sq) == count) {
              record(*z, count);
              return;
            }
          } catch (const Error& e) {
            if (e.code() != ErrorCode::BoundaryZero) throw;
          }
        }
      }
    }
    if (count == 1 || diam <= cluster_size) {
      if (auto z = newton(center, count, r)) {
        record(*z, count);
        return;
      }
      if (diam <= 1e-3 * cluster_size || depth > 200) {
        record(center, count);
        return;
      }
    }
    int left = 0;
    auto [a, b] = split(r, left);
    isolate(a, left, depth + 1);
    isolate(b, count - left, depth + 1);
  }
};

// Moves a horizontal line off zeros of F by golden-ratio offsets; returns the new ordinate.
double nudge_line(const Contour& C, double re_lo, double re_hi, double y, double scale, const std::string& what,
                  std::vector<std::string>& log) {
  for (int j = 0; j < 64; ++j) {
    const double off = j == 0 ? 0.0 : scale * (std::fmod(j * kGolden, 1.0) - 0.5);
    try {
      C.arg_change(Complex(re_lo, y + off), Complex(re_hi, y + off));
      if (j > 0) log.push_back(what + " moved from " + fmt(y) + " to " + fmt(y + off));
      return y + off;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::BoundaryZero) throw;
    }
  }
  fail(ErrorCode::BoundaryZero, what + " could not be moved off the zero set");
}

ZeroSearch locate_1d(const ExpSystem& S, const StripBox& box, const ZeroFinderOptions& opt) {
  const CompiledExpSum F(S.components.front());
  const Contour C(F, opt);
  ZeroSearch out;
  out.box = box;
  const double R = box.R;
  auto [y0, y1] = box.window.front();
  const double height = y1 - y0;
  y0 = nudge_line(C, -R, R, y0, 1e-7 * std::max(1.0, height), "window lower edge", out.nudges);
  y1 = nudge_line(C, -R, R, y1, 1e-7 * std::max(1.0, height), "window upper edge", out.nudges);
  out.box.window.front() = {y0, y1};

  const Eigen::MatrixXd& fr = F.frequencies();
  const double width = fr.maxCoeff() - fr.minCoeff();
  const double tile = width > 0 ? 4.0 / width : height;
  const auto tiles = static_cast<std::size_t>(std::max(1.0, std::ceil((y1 - y0) / tile)));
  std::vector<double> cuts{y0};
  for (std::size_t k = 1; k < tiles; ++k) {
    const double y = y0 + (y1 - y0) * static_cast<double>(k) / static_cast<double>(tiles);
    cuts.push_back(nudge_line(C, -R, R, y, 0.1 * (y1 - y0) / static_cast<double>(tiles),
                              "tile boundary " + std::to_string(k), out.nudges));
  }
  cuts.push_back(y1);

  const double diam = std::hypot(2.0 * R, y1 - y0);
  std::vector<std::vector<ZeroRecord>> per_tile(tiles);
  std::vector<int> counts(tiles);
  parallel_for(tiles, [&](std::size_t t) {
    const Rect r{-R, R, cuts[t], cuts[t + 1]};
    counts[t] = C.winding(r);
    Isolator iso{S.components.front(), F, C, opt, opt.tau_sep * diam, {}, {}};
    iso.isolate(r, counts[t], 0);
    per_tile[t] = std::move(iso.found);
  });
  int total = 0;
  for (std::size_t t = 0; t < tiles; ++t) {
    total += counts[t];
    for (auto& z : per_tile[t]) out.zeros.push_back(std::move(z));
  }
  out.expected = total;
  for (const auto& z : out.zeros) {
    const double scale = term_scale_1d(F, z.z[0].real());
    if (z.residual > opt.tau_res * scale)
      out.warnings.push_back("residual " + fmt(z.residual) + " above tolerance at im " + fmt(z.z[0].imag()));
  }
  return out;
}

struct NewtonResult {
  bool ok = false;
  std::vector<Complex> z;
  double residual = 0.0;
  double condition = 1.0;
};

NewtonResult damped_newton(const std::vector<CompiledExpSum>& sys, std::vector<Complex> z, double R,
                           const ZeroFinderOptions& opt) {
  const std::size_t n = sys.size();
  const auto ni = static_cast<Eigen::Index>(n);
  Eigen::VectorXcd f(ni);
  Eigen::MatrixXcd J(ni, ni);
  std::vector<Complex> grad(n);
  auto eval = [&](const std::vector<Complex>& p, bool jac) {
    for (std::size_t j = 0; j < n; ++j) {
      if (jac) {
        f(static_cast<Eigen::Index>(j)) = sys[j].value_and_gradient(p, grad);
        for (std::size_t k = 0; k < n; ++k) J(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = grad[k];
      } else {
        f(static_cast<Eigen::Index>(j)) = sys[j](p);
      }
    }
    return f.cwiseAbs().maxCoeff();
  };
  // Residual relative to the size of each component's terms at p.
  auto relative = [&](const std::vector<Complex>& p) {
    Eigen::VectorXd x(ni);
    for (std::size_t k = 0; k < n; ++k) x(static_cast<Eigen::Index>(k)) = p[k].real();
    double worst = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      worst = std::max(worst, std::abs(f(static_cast<Eigen::Index>(j))) / term_scale(sys[j], x));
    return worst;
  };
  const double escape = 4.0 * (R + 1.0);
  double res = eval(z, true);
  int polish = 0;
  for (int it = 0; it < 80; ++it) {
    const bool small = relative(z) <= opt.tau_res;
    if (small && ++polish > 2) break;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(J);
    const Eigen::VectorXcd d = lu.solve(-f);
    if (!d.allFinite()) return {};
    double t = 1.0;
    std::vector<Complex> trial(n);
    double tres = 0.0;
    for (int bt = 0; bt < 30; ++bt) {
      for (std::size_t k = 0; k < n; ++k) trial[k] = z[k] + t * d(static_cast<Eigen::Index>(k));
      tres = eval(trial, false);
      if (small || tres < (1.0 - 1e-4 * t) * res || t < 1e-6) break;
      t *= 0.5;
    }
    z = trial;
    res = eval(z, true);
    double re2 = 0.0;
    for (const auto& c : z) re2 += c.real() * c.real();
    if (!std::isfinite(res) || std::sqrt(re2) > escape) return {};
  }
  NewtonResult out;
  out.z = z;
  out.residual = res;
  out.ok = relative(z) <= opt.tau_res;
  if (out.ok) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(J);
    const auto& sv = svd.singularValues();
    out.condition = sv(ni - 1) > 0 ? sv(0) / sv(ni - 1) : std::numeric_limits<double>::infinity();
  }
  return out;
}

ZeroSearch locate_nd(const ExpSystem& S, const StripBox& box, const ZeroFinderOptions& opt) {
  const std::size_t n = S.n();
  const auto sys = compile(S);
  // Newton runs on each component divided by the monomial at the centre of its
  // support and by its largest coefficient, so gauge factors do not change the iteration.
  std::vector<CompiledExpSum> centred;
  for (const auto& F : S.components) {
    Exponent mid(F.rank(), 0);
    double big = 0.0;
    for (const auto& [m, c] : F.terms()) {
      for (std::size_t i = 0; i < mid.size(); ++i) mid[i] += m[i];
      big = std::max(big, std::abs(c));
    }
    const auto cnt = static_cast<double>(F.size());
    for (auto& v : mid) v = -static_cast<std::int64_t>(std::floor(static_cast<double>(v) / cnt + 0.5));
    centred.emplace_back(F.shifted(mid) * Complex(1.0 / big));
  }
  ZeroSearch out;
  out.box = box;

  std::vector<Polytope> polys;
  for (const auto& F : S.components) polys.push_back(newton_polytope(F));
  double vol = 1.0, diam2 = 0.0;
  for (const auto& [lo, hi] : box.window) {
    vol *= hi - lo;
    diam2 += (hi - lo) * (hi - lo);
  }
  double fact = 1.0;
  for (std::size_t k = 2; k <= n; ++k) fact *= static_cast<double>(k);
  out.expected = fact * mixed_volume(polys) * vol;
  const auto starts = static_cast<std::size_t>(std::max(64.0, std::ceil(opt.start_factor * out.expected)));
  out.starts = starts;

  // Sobol points with a seeded Cranley-Patterson shift.
  const std::size_t dims = 2 * n;
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> shift(dims);
  for (auto& s : shift) s = unif(rng);
  boost::random::sobol qrng(dims);
  const double denom = static_cast<double>(qrng.max()) + 1.0;
  std::vector<std::vector<Complex>> start_pts(starts, std::vector<Complex>(n));
  for (std::size_t s = 0; s < starts; ++s) {
    std::vector<double> u(dims);
    for (std::size_t d = 0; d < dims; ++d) u[d] = std::fmod((static_cast<double>(qrng()) + 0.5) / denom + shift[d], 1.0);
    for (std::size_t k = 0; k < n; ++k) {
      const auto [lo, hi] = box.window[k];
      const double pad = std::min(1.0, 0.05 * (hi - lo));
      start_pts[s][k] = Complex(-box.R + 2.0 * box.R * u[k], lo - pad + (hi - lo + 2.0 * pad) * u[n + k]);
    }
  }

  std::vector<NewtonResult> results(starts);
  parallel_for(starts, [&](std::size_t s) { results[s] = damped_newton(centred, start_pts[s], box.R, opt);
    if (results[s].ok) {
      double res = 0.0;
      for (const auto& F : sys) res = std::max(res, std::abs(F(results[s].z)));
      results[s].residual = res;
    }
  });

  const double tau = opt.tau_sep * std::sqrt(diam2 + 4.0 * box.R * box.R * static_cast<double>(n));
  std::map<std::vector<std::int64_t>, std::vector<std::size_t>> grid;
  auto cell = [&](const std::vector<Complex>& z) {
    std::vector<std::int64_t> c;
    for (const auto& v : z) {
      c.push_back(static_cast<std::int64_t>(std::floor(v.real() / tau)));
      c.push_back(static_cast<std::int64_t>(std::floor(v.imag() / tau)));
    }
    return c;
  };
  for (const auto& r : results) {
    if (!r.ok) continue;
    double re2 = 0.0;
    for (const auto& c : r.z) re2 += c.real() * c.real();
    bool inside = std::sqrt(re2) <= box.R;
    for (std::size_t k = 0; k < n; ++k)
      inside = inside && r.z[k].imag() >= box.window[k].first && r.z[k].imag() <= box.window[k].second;
    if (!inside) continue;
    const auto base = cell(r.z);
    bool dup = false;
    std::vector<std::int64_t> probe(base.size());
    const std::size_t combos = static_cast<std::size_t>(std::pow(3.0, static_cast<double>(base.size())));
    for (std::size_t m = 0; m < combos && !dup; ++m) {
      std::size_t q = m;
      for (std::size_t i = 0; i < base.size(); ++i, q /= 3) probe[i] = base[i] + static_cast<std::int64_t>(q % 3) - 1;
      auto it = grid.find(probe);
      if (it == grid.end()) continue;
      for (auto idx : it->second) {
        double d2 = 0.0;
        for (std::size_t k = 0; k < n; ++k) d2 += std::norm(out.zeros[idx].z[k] - r.z[k]);
        if (std::sqrt(d2) < tau) dup = true;
      }
    }
    if (dup) continue;
    grid[base].push_back(out.zeros.size());
    ZeroRecord rec;
    rec.z = r.z;
    rec.multiplicity = 1;
    rec.multiplicity_unverified = true;
    rec.residual = r.residual;
    rec.jacobian_condition = r.condition;
    out.zeros.push_back(std::move(rec));
  }
  const double found = static_cast<double>(out.zeros.size());
  if (out.expected > 0 && std::abs(found - out.expected) > opt.cover_tol * out.expected)
    out.warnings.push_back("IncompleteCover: found " + std::to_string(out.zeros.size()) + " zeros, expected about " +
                           fmt(out.expected));
  return out;
}

}  // namespace

StripValidation strip_radius(const ExpSystem& S, const ZeroFinderOptions& opt) {
  S.validate();
  std::vector<Polytope> polys;
  for (const auto& F : S.components) polys.push_back(newton_polytope(F));
  bool point = false;
  for (const auto& P : polys) point = point || P.is_point();
  if (point || !is_developed(polys).developed)
    fail(ErrorCode::NotDeveloped, "strip radius requires a developed system");

  const std::size_t n = S.n();
  const auto sys = compile(S);
  const std::size_t count = n == 2 ? 720 : 2000;
  StripValidation v;
  const auto dirs = directions(n, count, 0.0);
  v.directions = dirs.size();
  double bound = 0.0;
  for (const auto& u : dirs) {
    const double r = certified_radius(sys, u, opt.r_max);
    if (!std::isfinite(r)) fail(ErrorCode::NoConvergence, "no dominant component along a sampled direction");
    bound = std::max(bound, r);
  }
  v.bound = bound;
  double R = bound + opt.strip_margin;
  const auto check_dirs = directions(n, 4 * count, 0.37);
  for (;;) {
    bool ok = true;
    for (const auto& u : check_dirs) {
      for (double r : {R, R + opt.strip_margin}) {
        ++v.samples;
        if (!dominated(sys, r * u)) ok = false;
      }
      if (!ok) break;
    }
    if (ok) break;
    R *= 2.0;
    ++v.doublings;
    if (R > opt.r_max) fail(ErrorCode::NoConvergence, "strip radius exceeded r_max without validation");
  }
  v.R = R;
  return v;
}

int count_zeros_rect_1d(const ExpSum& F, const Rect& rect, const ZeroFinderOptions& opt) {
  if (F.n() != 1) fail(ErrorCode::InvalidArgument, "rectangle counting is for one variable");
  if (!(rect.re_lo < rect.re_hi) || !(rect.im_lo < rect.im_hi)) fail(ErrorCode::InvalidArgument, "empty rectangle");
  const CompiledExpSum C(F);
  return Contour(C, opt).winding(rect);
}

ZeroSearch locate_zeros(const ExpSystem& S, const StripBox& box, const ZeroFinderOptions& opt) {
  S.validate();
  if (box.window.size() != S.n()) fail(ErrorCode::InvalidArgument, "window dimension does not match the system");
  for (const auto& [lo, hi] : box.window)
    if (!(lo < hi)) fail(ErrorCode::InvalidArgument, "empty window");
  if (!(box.R > 0)) fail(ErrorCode::InvalidArgument, "strip radius must be positive");
  ZeroSearch out = S.n() == 1 ? locate_1d(S, box, opt) : locate_nd(S, box, opt);
  std::sort(out.zeros.begin(), out.zeros.end(), [](const ZeroRecord& a, const ZeroRecord& b) {
    for (std::size_t k = 0; k < a.z.size(); ++k)
      if (a.z[k].imag() != b.z[k].imag()) return a.z[k].imag() < b.z[k].imag();
    for (std::size_t k = 0; k < a.z.size(); ++k)
      if (a.z[k].real() != b.z[k].real()) return a.z[k].real() < b.z[k].real();
    return false;
  });
  return out;
}

void write_zeros_csv(std::ostream& os, const std::vector<ZeroRecord>& zeros, std::size_t n) {
  os << "# schema_version=1 zeros n=" << n << "\n";
  for (std::size_t k = 1; k <= n; ++k) os << "re_" << k << ",im_" << k << ",";
  os << "mult,residual\n";
  for (const auto& z : zeros) {
    for (const auto& c : z.z) os << fmt(c.real()) << "," << fmt(c.imag()) << ",";
    os << z.multiplicity << "," << fmt(z.residual) << "\n";
  }
}

}  // namespace expsum
