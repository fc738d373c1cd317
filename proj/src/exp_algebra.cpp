#include "expsum/exp_algebra.hpp"

#include "expsum/error.hpp"
#include "expsum/linear_program.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace expsum {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void add_term(std::map<Exponent, Complex>& terms, const Exponent& m, Complex c) {
  auto [it, inserted] = terms.emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == Complex(0.0)) terms.erase(it);
  } else if (c == Complex(0.0)) {
    terms.erase(it);
  }
}

Exponent add_exp(const Exponent& a, const Exponent& b) {
  Exponent out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

Exponent negate_exp(const Exponent& a) {
  Exponent out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = -a[i];
  return out;
}

bool same_lattice(const FrequencyLattice& a, const FrequencyLattice& b) {
  if (&a == &b) return true;
  if (a.n() != b.n() || a.rank() != b.rank() || a.exact() != b.exact()) return false;
  if (a.exact()) {
    for (std::size_t i = 0; i < a.rank(); ++i)
      for (std::size_t c = 0; c < a.n(); ++c)
        if (!(a.basis()[i].entries[c].exact_value == b.basis()[i].entries[c].exact_value)) return false;
    return true;
  }
  return a.basis_matrix() == b.basis_matrix();
}

Frequency frequency_for(const FrequencyLattice& L, const Exponent& m) {
  if (L.exact()) return frequency_from_exact(L.exact_frequency_of(m));
  return frequency_from_real(L.frequency_of(m));
}

}  // namespace

ExpSum::ExpSum(LatticePtr lattice, std::map<Exponent, Complex> terms) : lattice_(std::move(lattice)) {
  if (!lattice_) fail(ErrorCode::InvalidArgument, "exponential sum needs a lattice");
  for (auto& [m, c] : terms) {
    if (m.size() != lattice_->rank())
      fail(ErrorCode::InvalidArgument, "exponent length does not match lattice rank");
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
      fail(ErrorCode::InvalidArgument, "non-finite coefficient");
    if (c != Complex(0.0)) terms_.emplace(m, c);
  }
}

ExpSum ExpSum::constant(LatticePtr lattice, Complex c) {
  const std::size_t N = lattice->rank();
  return ExpSum(std::move(lattice), {{Exponent(N, 0), c}});
}

ExpSum ExpSum::monomial(LatticePtr lattice, const Exponent& m, Complex c) {
  return ExpSum(std::move(lattice), {{m, c}});
}

Complex ExpSum::coefficient(const Exponent& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? Complex(0.0) : it->second;
}

void require_same_lattice(const ExpSum& a, const ExpSum& b) {
  if (!a.lattice_ptr() || !b.lattice_ptr() || !same_lattice(a.lattice(), b.lattice()))
    fail(ErrorCode::LatticeMismatch, "exponential sums live on different frequency lattices");
}

ExpSum ExpSum::operator+(const ExpSum& o) const {
  require_same_lattice(*this, o);
  std::map<Exponent, Complex> t = terms_;
  for (const auto& [m, c] : o.terms_) add_term(t, m, c);
  return ExpSum(lattice_, std::move(t));
}

ExpSum ExpSum::operator-(const ExpSum& o) const { return *this + o * Complex(-1.0); }

ExpSum ExpSum::operator*(Complex s) const {
  std::map<Exponent, Complex> t;
  for (const auto& [m, c] : terms_) t.emplace(m, c * s);
  return ExpSum(lattice_, std::move(t));
}

ExpSum ExpSum::shifted(const Exponent& delta) const {
  if (delta.size() != rank()) fail(ErrorCode::InvalidArgument, "shift length does not match lattice rank");
  std::map<Exponent, Complex> t;
  for (const auto& [m, c] : terms_) t.emplace(add_exp(m, delta), c);
  return ExpSum(lattice_, std::move(t));
}

ExpSum ExpSum::derivative(std::size_t k) const {
  if (k >= n()) fail(ErrorCode::InvalidArgument, "derivative index out of range");
  std::map<Exponent, Complex> t;
  for (const auto& [m, c] : terms_) {
    const double a = lattice_->frequency_of(m)(static_cast<Eigen::Index>(k));
    t.emplace(m, c * (kTwoPi * a));
  }
  return ExpSum(lattice_, std::move(t));
}

std::string ExpSum::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  os.precision(12);
  bool first = true;
  for (const auto& [m, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << "(" << c.real() << (c.imag() < 0 ? "-" : "+") << std::abs(c.imag()) << "i)";
    bool zero = std::all_of(m.begin(), m.end(), [](std::int64_t v) { return v == 0; });
    if (!zero) {
      os << "*e[";
      for (std::size_t i = 0; i < m.size(); ++i) os << (i ? "," : "") << m[i];
      os << "]";
    }
  }
  return os.str();
}

ExpSum multiply(const ExpSum& F, const ExpSum& G) {
  require_same_lattice(F, G);
  std::map<Exponent, Complex> t;
  for (const auto& [a, ca] : F.terms())
    for (const auto& [b, cb] : G.terms()) add_term(t, add_exp(a, b), ca * cb);
  return ExpSum(F.lattice_ptr(), std::move(t));
}

Complex evaluate(const ExpSum& F, std::span<const Complex> z) {
  if (z.size() != F.n()) fail(ErrorCode::InvalidArgument, "point dimension does not match");
  Complex sum(0.0);
  for (const auto& [m, c] : F.terms()) {
    const Eigen::VectorXd a = F.lattice().frequency_of(m);
    Complex s(0.0);
    for (std::size_t k = 0; k < z.size(); ++k) s += a(static_cast<Eigen::Index>(k)) * z[k];
    sum += c * std::exp(kTwoPi * s);
  }
  return sum;
}

CompiledExpSum::CompiledExpSum(const ExpSum& F) : n_(F.n()) {
  freqs_.resize(static_cast<Eigen::Index>(F.size()), static_cast<Eigen::Index>(n_));
  Eigen::Index r = 0;
  for (const auto& [m, c] : F.terms()) {
    freqs_.row(r++) = F.lattice().frequency_of(m).transpose();
    coefs_.push_back(c);
  }
}

Complex CompiledExpSum::operator()(std::span<const Complex> z) const {
  Complex sum(0.0);
  for (std::size_t t = 0; t < coefs_.size(); ++t) {
    Complex s(0.0);
    for (std::size_t k = 0; k < n_; ++k) s += freqs_(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(k)) * z[k];
    sum += coefs_[t] * std::exp(kTwoPi * s);
  }
  return sum;
}

Complex CompiledExpSum::value_and_gradient(std::span<const Complex> z, std::span<Complex> grad) const {
  Complex sum(0.0);
  for (std::size_t k = 0; k < n_; ++k) grad[k] = 0.0;
  for (std::size_t t = 0; t < coefs_.size(); ++t) {
    const auto ti = static_cast<Eigen::Index>(t);
    Complex s(0.0);
    for (std::size_t k = 0; k < n_; ++k) s += freqs_(ti, static_cast<Eigen::Index>(k)) * z[k];
    const Complex v = coefs_[t] * std::exp(kTwoPi * s);
    sum += v;
    for (std::size_t k = 0; k < n_; ++k) grad[k] += (kTwoPi * freqs_(ti, static_cast<Eigen::Index>(k))) * v;
  }
  return sum;
}

double CompiledExpSum::derivative_bound(std::span<const double> re_lo, std::span<const double> re_hi) const {
  double bound = 0.0;
  for (std::size_t t = 0; t < coefs_.size(); ++t) {
    const auto ti = static_cast<Eigen::Index>(t);
    double growth = 0.0;
    for (std::size_t k = 0; k < n_; ++k) {
      const double a = freqs_(ti, static_cast<Eigen::Index>(k));
      growth += std::max(a * re_lo[k], a * re_hi[k]);
    }
    bound += std::abs(coefs_[t]) * kTwoPi * freqs_.row(ti).norm() * std::exp(kTwoPi * growth);
  }
  return bound;
}

double CompiledExpSum::coefficient_scale() const {
  double s = 0.0;
  for (const auto& c : coefs_) s = std::max(s, std::abs(c));
  return s;
}

void ExpSystem::validate() const {
  if (components.empty()) fail(ErrorCode::InvalidArgument, "empty system");
  const std::size_t n = components.front().n();
  if (components.size() != n)
    fail(ErrorCode::InvalidArgument, "system has " + std::to_string(components.size()) + " equations in " +
                                         std::to_string(n) + " variables");
  for (const auto& F : components) {
    require_same_lattice(components.front(), F);
    if (F.is_zero()) fail(ErrorCode::DegenerateInput, "system component is identically zero");
  }
}

namespace {

ExpSum det_expand(const std::vector<std::vector<ExpSum>>& M, std::vector<std::size_t>& cols, std::size_t row,
                  const LatticePtr& L) {
  if (cols.size() == 1) return M[row][cols[0]];
  ExpSum acc(L, {});
  for (std::size_t j = 0; j < cols.size(); ++j) {
    const std::size_t c = cols[j];
    if (M[row][c].is_zero()) continue;
    std::vector<std::size_t> rest;
    for (std::size_t q = 0; q < cols.size(); ++q)
      if (q != j) rest.push_back(cols[q]);
    ExpSum minor = det_expand(M, rest, row + 1, L);
    ExpSum term = multiply(M[row][c], minor);
    acc = (j % 2 == 0) ? acc + term : acc - term;
  }
  return acc;
}

}  // namespace

ExpSum jacobian_det(const ExpSystem& S) {
  S.validate();
  const std::size_t n = S.n();
  std::vector<std::vector<ExpSum>> M(n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k) M[j].push_back(S.components[j].derivative(k));
  std::vector<std::size_t> cols(n);
  for (std::size_t k = 0; k < n; ++k) cols[k] = k;
  return det_expand(M, cols, 0, S.lattice_ptr());
}

bool is_spectrum_vertex(const ExpSum& F, const Exponent& m) {
  if (F.coefficient(m) == Complex(0.0)) return false;
  if (F.size() == 1) return true;
  const Eigen::VectorXd a = F.frequency(m);
  Eigen::MatrixXd dirs(static_cast<Eigen::Index>(F.size() - 1), static_cast<Eigen::Index>(F.n()));
  double diam = 0.0;
  Eigen::Index r = 0;
  for (const auto& [b, c] : F.terms()) {
    if (b == m) continue;
    dirs.row(r) = (a - F.frequency(b)).transpose();
    diam = std::max(diam, dirs.row(r).norm());
    ++r;
  }
  const ConeFunctional cf = max_min_functional(dirs);
  return cf.delta > 1e-9 * diam;
}

VertexNormalization normalize_at_vertex(const ExpSum& F, const Exponent& vertex) {
  if (!is_spectrum_vertex(F, vertex))
    fail(ErrorCode::NotAVertex, "frequency is not a vertex of the Newton polytope");
  const Complex d = F.coefficient(vertex);
  ExpSum shifted = F.shifted(negate_exp(vertex)) * (1.0 / d);
  std::map<Exponent, Complex> t = shifted.terms();
  t[Exponent(F.rank(), 0)] = 1.0;  // exact, not d/d rounded
  return {ExpSum(F.lattice_ptr(), std::move(t)), d};
}

ConstantTermReport vertex_constant_term_report(const ExpSum& Ft, const ExpSum& H, std::size_t extra_depth) {
  require_same_lattice(Ft, H);
  const std::size_t N = Ft.rank();
  const Exponent zero(N, 0);
  if (std::abs(Ft.constant_term() - Complex(1.0)) > 1e-12)
    fail(ErrorCode::InvalidArgument, "normalized sum must have constant term 1");

  ConstantTermReport rep;
  rep.xi = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(N));
  std::map<Exponent, Complex> step;  // 1 - Ft
  for (const auto& [m, c] : Ft.terms())
    if (m != zero) step.emplace(m, -c);
  if (step.empty()) {
    rep.value = H.constant_term();
    rep.delta = std::numeric_limits<double>::infinity();
    return rep;
  }

  Eigen::MatrixXd rows(static_cast<Eigen::Index>(step.size()), static_cast<Eigen::Index>(N));
  Eigen::Index r = 0;
  for (const auto& [m, c] : step) {
    for (std::size_t i = 0; i < N; ++i) rows(r, static_cast<Eigen::Index>(i)) = static_cast<double>(m[i]);
    ++r;
  }
  const ConeFunctional cf = max_min_functional(rows);
  if (!(cf.delta > 1e-12))
    fail(ErrorCode::ConeViolation, "support of 1 - F~ admits no strictly positive functional");
  rep.xi = cf.xi;
  rep.delta = cf.delta;

  auto xi_of = [&](const Exponent& m) {
    double s = 0.0;
    for (std::size_t i = 0; i < N; ++i) s += cf.xi(static_cast<Eigen::Index>(i)) * static_cast<double>(m[i]);
    return s;
  };

  // A product term e can still cancel some H exponent tau only if xi(e) <= xi(-tau).
  double reach = -std::numeric_limits<double>::infinity();
  for (const auto& [tau, c] : H.terms()) reach = std::max(reach, -xi_of(tau));
  const double slack = 1e-9 * (1.0 + std::abs(reach));
  if (H.is_zero() || reach < -slack) {
    rep.value = 0.0;
    return rep;
  }
  const auto depth = static_cast<std::size_t>(std::floor(reach / cf.delta + 1e-9)) + extra_depth;
  rep.depth = depth;

  auto collect = [&](const std::map<Exponent, Complex>& P) {
    Complex s(0.0);
    for (const auto& [tau, h] : H.terms()) {
      auto it = P.find(negate_exp(tau));
      if (it != P.end()) s += h * it->second;
    }
    return s;
  };

  std::map<Exponent, Complex> P{{zero, 1.0}};
  Complex value = collect(P);
  for (std::size_t k = 1; k <= depth; ++k) {
    std::map<Exponent, Complex> next;
    for (const auto& [a, ca] : P)
      for (const auto& [b, cb] : step) {
        Exponent e = add_exp(a, b);
        if (xi_of(e) > reach + slack) continue;
        add_term(next, e, ca * cb);
      }
    P = std::move(next);
    if (P.empty()) break;
    value += collect(P);
  }
  rep.value = value;
  return rep;
}

Complex vertex_constant_term(const ExpSum& Ft, const ExpSum& H, std::size_t extra_depth) {
  return vertex_constant_term_report(Ft, H, extra_depth).value;
}

TrigPoly::TrigPoly(std::size_t n, std::vector<TrigTerm> terms) : n_(n) {
  for (auto& t : terms) {
    if (t.alpha.dim() != n) fail(ErrorCode::InvalidArgument, "trigonometric term has wrong dimension");
    if (t.c == 0.0 && t.d == 0.0) continue;
    terms_.push_back(std::move(t));
  }
  freqs_.resize(static_cast<Eigen::Index>(terms_.size()), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < terms_.size(); ++i) freqs_.row(static_cast<Eigen::Index>(i)) = terms_[i].alpha.real().transpose();
}

double TrigPoly::operator()(const Eigen::VectorXd& x) const {
  double s = 0.0;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    const double th = kTwoPi * freqs_.row(static_cast<Eigen::Index>(i)).dot(x);
    s += terms_[i].c * std::cos(th) + terms_[i].d * std::sin(th);
  }
  return s;
}

double TrigPoly::value_gradient(const Eigen::VectorXd& x, Eigen::VectorXd& grad) const {
  grad = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_));
  double s = 0.0;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    const auto row = freqs_.row(static_cast<Eigen::Index>(i));
    const double th = kTwoPi * row.dot(x);
    const double cs = std::cos(th), sn = std::sin(th);
    s += terms_[i].c * cs + terms_[i].d * sn;
    grad += (kTwoPi * (-terms_[i].c * sn + terms_[i].d * cs)) * row.transpose();
  }
  return s;
}

double TrigPoly::value_gradient_hessian(const Eigen::VectorXd& x, Eigen::VectorXd& grad, Eigen::MatrixXd& hess) const {
  const auto n = static_cast<Eigen::Index>(n_);
  grad = Eigen::VectorXd::Zero(n);
  hess = Eigen::MatrixXd::Zero(n, n);
  double s = 0.0;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    const Eigen::VectorXd a = freqs_.row(static_cast<Eigen::Index>(i)).transpose();
    const double th = kTwoPi * a.dot(x);
    const double cs = std::cos(th), sn = std::sin(th);
    const double v = terms_[i].c * cs + terms_[i].d * sn;
    s += v;
    grad += (kTwoPi * (-terms_[i].c * sn + terms_[i].d * cs)) * a;
    hess -= (kTwoPi * kTwoPi * v) * (a * a.transpose());
  }
  return s;
}

double TrigPoly::max_frequency() const {
  double m = 0.0;
  for (Eigen::Index i = 0; i < freqs_.rows(); ++i) m = std::max(m, freqs_.row(i).norm());
  return m;
}

double TrigPoly::coefficient_scale() const {
  double s = 0.0;
  for (const auto& t : terms_) s += std::hypot(t.c, t.d);
  return s;
}

ExpSum trig_to_expsum(const TrigPoly& T, const LatticePtr& lattice) {
  if (T.n() != lattice->n()) fail(ErrorCode::InvalidArgument, "dimension mismatch between polynomial and lattice");
  std::map<Exponent, Complex> t;
  for (const auto& term : T.terms()) {
    auto m = coords_of(term.alpha, *lattice);
    if (!m) fail(ErrorCode::LatticeMismatch, "frequency " + term.alpha.to_string() + " is not in the lattice");
    add_term(t, *m, Complex(term.c, -term.d) * 0.5);
    add_term(t, negate_exp(*m), Complex(term.c, term.d) * 0.5);
  }
  return ExpSum(lattice, std::move(t));
}

TrigPoly expsum_to_trig(const ExpSum& F) {
  const Exponent zero(F.rank(), 0);
  std::vector<TrigTerm> out;
  for (const auto& [m, a] : F.terms()) {
    auto first = std::find_if(m.begin(), m.end(), [](std::int64_t v) { return v != 0; });
    if (first == m.end()) {
      out.push_back({frequency_for(F.lattice(), zero), a.real(), 0.0});
      continue;
    }
    const Exponent neg = negate_exp(m);
    const Complex b = F.coefficient(neg);
    if (*first < 0) {
      if (b != Complex(0.0)) continue;  // emitted with its positive partner
      out.push_back({frequency_for(F.lattice(), neg), b.real() + a.real(), a.imag() - b.imag()});
      continue;
    }
    out.push_back({frequency_for(F.lattice(), m), (a + b).real(), b.imag() - a.imag()});
  }
  return TrigPoly(F.n(), std::move(out));
}

}  // namespace expsum
