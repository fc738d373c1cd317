#include "expsum/freq_lattice.hpp"

#include "expsum/error.hpp"
#include "expsum/integer_relation.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

namespace expsum {

namespace {

using boost::multiprecision::denominator;
using boost::multiprecision::numerator;

using IntMatrix = std::vector<std::vector<BigInt>>;

// Solves c * rows = target; rows are r vectors of length D.
std::optional<std::vector<Rational>> solve_left(const RationalMatrix& rows, const std::vector<Rational>& target) {
  const std::size_t r = rows.size();
  const std::size_t d = target.size();
  // Augmented system (D x (r+1)): column j holds rows[j].
  RationalMatrix a(d, std::vector<Rational>(r + 1));
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < r; ++j) a[i][j] = rows[j][i];
    a[i][r] = target[i];
  }
  std::vector<std::size_t> pivot_col;
  std::size_t row = 0;
  for (std::size_t col = 0; col < r && row < d; ++col) {
    std::size_t p = row;
    while (p < d && a[p][col] == 0) ++p;
    if (p == d) continue;
    std::swap(a[p], a[row]);
    const Rational inv = Rational(1) / a[row][col];
    for (auto& v : a[row]) v *= inv;
    for (std::size_t i = 0; i < d; ++i) {
      if (i == row || a[i][col] == 0) continue;
      const Rational f = a[i][col];
      for (std::size_t j = col; j <= r; ++j) a[i][j] -= f * a[row][j];
    }
    pivot_col.push_back(col);
    ++row;
  }
  for (std::size_t i = row; i < d; ++i)
    if (a[i][r] != 0) return std::nullopt;
  if (pivot_col.size() != r) fail(ErrorCode::Internal, "dependent Q-basis");
  std::vector<Rational> c(r);
  for (std::size_t i = 0; i < pivot_col.size(); ++i) c[pivot_col[i]] = a[i][r];
  return c;
}

RationalMatrix invert(const RationalMatrix& m) {
  const std::size_t n = m.size();
  RationalMatrix a(n, std::vector<Rational>(2 * n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a[i][j] = m[i][j];
    a[i][n + i] = 1;
  }
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t p = col;
    while (p < n && a[p][col] == 0) ++p;
    if (p == n) fail(ErrorCode::Internal, "singular basis matrix");
    std::swap(a[p], a[col]);
    const Rational inv = Rational(1) / a[col][col];
    for (auto& v : a[col]) v *= inv;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == col || a[i][col] == 0) continue;
      const Rational f = a[i][col];
      for (std::size_t j = 0; j < 2 * n; ++j) a[i][j] -= f * a[col][j];
    }
  }
  RationalMatrix out(n, std::vector<Rational>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out[i][j] = a[i][n + j];
  return out;
}

Rational determinant(RationalMatrix a) {
  const std::size_t n = a.size();
  Rational det = 1;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t p = col;
    while (p < n && a[p][col] == 0) ++p;
    if (p == n) return 0;
    if (p != col) {
      std::swap(a[p], a[col]);
      det = -det;
    }
    det *= a[col][col];
    for (std::size_t i = col + 1; i < n; ++i) {
      if (a[i][col] == 0) continue;
      const Rational f = a[i][col] / a[col][col];
      for (std::size_t j = col; j < n; ++j) a[i][j] -= f * a[col][j];
    }
  }
  return det;
}

// Row-style Hermite normal form; returns the nonzero rows (upper triangular,
// positive pivots, entries above each pivot reduced into [0, pivot)).
IntMatrix hermite_rows(IntMatrix m, std::size_t cols) {
  std::size_t row = 0;
  for (std::size_t col = 0; col < cols && row < m.size(); ++col) {
    for (;;) {
      std::size_t best = m.size();
      for (std::size_t i = row; i < m.size(); ++i) {
        if (m[i][col] == 0) continue;
        if (best == m.size() || abs(m[i][col]) < abs(m[best][col])) best = i;
      }
      if (best == m.size()) break;
      std::swap(m[best], m[row]);
      bool done = true;
      for (std::size_t i = row + 1; i < m.size(); ++i) {
        if (m[i][col] == 0) continue;
        const BigInt q = m[i][col] / m[row][col];
        for (std::size_t j = 0; j < cols; ++j) m[i][j] -= q * m[row][j];
        if (m[i][col] != 0) done = false;
      }
      if (done) break;
    }
    if (row >= m.size() || m[row][col] == 0) continue;
    if (m[row][col] < 0)
      for (auto& v : m[row]) v = -v;
    for (std::size_t i = 0; i < row; ++i) {
      BigInt q = m[i][col] / m[row][col];
      if (m[i][col] - q * m[row][col] < 0) q -= 1;
      if (q != 0)
        for (std::size_t j = 0; j < cols; ++j) m[i][j] -= q * m[row][j];
    }
    ++row;
  }
  m.resize(row);
  return m;
}

std::int64_t to_i64(const Rational& r) {
  if (denominator(r) != 1) fail(ErrorCode::Internal, "non-integral coordinate");
  const BigInt v = numerator(r);
  if (abs(v) > BigInt(std::numeric_limits<std::int64_t>::max()))
    fail(ErrorCode::Internal, "coordinate overflow");
  return static_cast<std::int64_t>(v);
}

std::int64_t gcd_all(const std::vector<std::int64_t>& v) {
  std::int64_t g = 0;
  for (auto x : v) g = std::gcd(g, std::llabs(x));
  return g;
}

// Lexicographic comparison of concatenated absolute coordinates.
bool lex_smaller(const std::vector<Exponent>& a, const std::vector<Exponent>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < a[i].size(); ++j) {
      const auto x = std::llabs(a[i][j]);
      const auto y = std::llabs(b[i][j]);
      if (x != y) return x < y;
    }
  }
  return false;
}

}  // namespace

bool Frequency::exact() const {
  return std::all_of(entries.begin(), entries.end(), [](const FrequencyValue& v) { return v.exact; });
}

Eigen::VectorXd Frequency::real() const {
  Eigen::VectorXd v(static_cast<Eigen::Index>(entries.size()));
  for (std::size_t i = 0; i < entries.size(); ++i) v(static_cast<Eigen::Index>(i)) = entries[i].value;
  return v;
}

std::string Frequency::to_string() const {
  std::string out = "(";
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (i) out += ", ";
    out += entries[i].exact ? entries[i].exact_value.to_string() : entries[i].source;
  }
  return out + ")";
}

Frequency parse_frequency(const std::vector<std::string>& components) {
  if (components.empty()) fail(ErrorCode::InvalidArgument, "frequency needs at least one component");
  Frequency f;
  for (const auto& c : components) f.entries.push_back(parse_frequency_expr(c));
  return f;
}

Frequency frequency_from_exact(const std::vector<ExactValue>& components) {
  Frequency f;
  for (const auto& c : components) {
    FrequencyValue v;
    v.exact = true;
    v.exact_value = c;
    v.value = c.to_double();
    v.source = c.to_string();
    f.entries.push_back(std::move(v));
  }
  return f;
}

Frequency frequency_from_real(const Eigen::VectorXd& r) {
  Frequency f;
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    FrequencyValue v;
    v.exact = false;
    v.value = r(i);
    std::ostringstream os;
    os.precision(17);
    os << r(i);
    v.source = os.str();
    f.entries.push_back(std::move(v));
  }
  return f;
}

Eigen::VectorXd FrequencyLattice::frequency_of(const Exponent& m) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_));
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m[i] != 0) out += static_cast<double>(m[i]) * basis_matrix_.row(static_cast<Eigen::Index>(i)).transpose();
  }
  return out;
}

std::vector<ExactValue> FrequencyLattice::exact_frequency_of(const Exponent& m) const {
  if (!exact_) fail(ErrorCode::InvalidArgument, "lattice has approximate entries");
  std::vector<ExactValue> out(n_);
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m[i] == 0) continue;
    for (std::size_t c = 0; c < n_; ++c) out[c] += basis_[i].entries[c].exact_value * Rational(m[i]);
  }
  return out;
}

std::string FrequencyLattice::describe() const {
  std::ostringstream os;
  os << "rank " << rank() << " in R^" << n_ << (exact_ ? " (exact)" : " (approximate)") << ", basis:";
  for (const auto& b : basis_) os << ' ' << b.to_string();
  return os.str();
}

FrequencyLattice find_basis(const std::vector<Frequency>& freqs, std::int64_t K, double eps) {
  if (freqs.empty()) fail(ErrorCode::InvalidArgument, "find_basis needs at least one frequency");
  if (K < 1) fail(ErrorCode::InvalidArgument, "coefficient bound K must be >= 1");
  if (!(eps > 0)) fail(ErrorCode::InvalidArgument, "eps_freq must be positive");
  const std::size_t n = freqs.front().dim();
  for (const auto& f : freqs)
    if (f.dim() != n || n == 0) fail(ErrorCode::InvalidArgument, "frequencies must share one dimension n >= 1");

  FrequencyLattice L;
  L.n_ = n;
  L.bound_ = K;
  L.eps_ = eps;
  L.inputs_ = freqs;
  L.exact_ = std::all_of(freqs.begin(), freqs.end(), [](const Frequency& f) { return f.exact(); });

  // Rational coordinates of every input relative to a Q-basis chosen greedily
  // among the inputs.
  std::vector<std::size_t> qbasis_inputs;
  std::vector<std::vector<Rational>> qcoords(freqs.size());

  if (L.exact_) {
    std::map<std::pair<std::size_t, std::int64_t>, std::size_t> key_index;
    for (const auto& f : freqs)
      for (std::size_t c = 0; c < n; ++c)
        for (const auto& [d, coef] : f.entries[c].exact_value.terms()) key_index.emplace(std::make_pair(c, d), 0);
    std::size_t idx = 0;
    for (auto& [key, i] : key_index) {
      i = idx++;
      L.keys_.push_back(key);
    }
    auto vectorize = [&](const Frequency& f) {
      std::vector<Rational> v(L.keys_.size());
      for (std::size_t c = 0; c < n; ++c)
        for (const auto& [d, coef] : f.entries[c].exact_value.terms()) v[key_index.at({c, d})] = coef;
      return v;
    };
    std::vector<std::vector<Rational>> vecs;
    for (const auto& f : freqs) vecs.push_back(vectorize(f));
    for (std::size_t j = 0; j < freqs.size(); ++j) {
      if (std::all_of(vecs[j].begin(), vecs[j].end(), [](const Rational& r) { return r == 0; })) continue;
      if (!solve_left(L.qbasis_, vecs[j])) {
        L.qbasis_.push_back(vecs[j]);
        qbasis_inputs.push_back(j);
      }
    }
    for (std::size_t j = 0; j < freqs.size(); ++j) qcoords[j] = *solve_left(L.qbasis_, vecs[j]);
  } else {
    std::vector<Eigen::VectorXd> qreal;
    for (std::size_t j = 0; j < freqs.size(); ++j) {
      const Eigen::VectorXd a = freqs[j].real();
      if (a.cwiseAbs().maxCoeff() <= eps) continue;
      Eigen::MatrixXd rows(static_cast<Eigen::Index>(qreal.size() + 1), static_cast<Eigen::Index>(n));
      rows.row(0) = a.transpose();
      for (std::size_t i = 0; i < qreal.size(); ++i) rows.row(static_cast<Eigen::Index>(i + 1)) = qreal[i].transpose();
      bool independent = true;
      if (!qreal.empty()) {
        const RelationSearch rel = find_integer_relation(rows, K, eps);
        if (rel.status == RelationStatus::Undecidable) {
          fail(ErrorCode::RelationUndetectable,
               "no stable relation decision for " + freqs[j].to_string() + " at eps_freq");
        }
        if (rel.status == RelationStatus::Found) {
          if (rel.coeffs[0] == 0) fail(ErrorCode::RelationUndetectable, "relation among previously independent frequencies");
          independent = false;
        }
      }
      if (independent) {
        qreal.push_back(a);
        qbasis_inputs.push_back(j);
      }
    }
    const std::size_t r = qreal.size();
    L.qbasis_real_.resize(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < r; ++i) L.qbasis_real_.row(static_cast<Eigen::Index>(i)) = qreal[i].transpose();
    for (std::size_t j = 0; j < freqs.size(); ++j) {
      qcoords[j].assign(r, Rational(0));
      auto pos = std::find(qbasis_inputs.begin(), qbasis_inputs.end(), j);
      if (pos != qbasis_inputs.end()) {
        qcoords[j][static_cast<std::size_t>(pos - qbasis_inputs.begin())] = 1;
        continue;
      }
      const Eigen::VectorXd a = freqs[j].real();
      if (a.cwiseAbs().maxCoeff() <= eps) continue;
      Eigen::MatrixXd rows(static_cast<Eigen::Index>(r + 1), static_cast<Eigen::Index>(n));
      rows.row(0) = a.transpose();
      rows.bottomRows(static_cast<Eigen::Index>(r)) = L.qbasis_real_;
      const RelationSearch rel = find_integer_relation(rows, K, eps);
      if (rel.status != RelationStatus::Found || rel.coeffs[0] == 0)
        fail(ErrorCode::RelationUndetectable, "unstable relation for " + freqs[j].to_string());
      for (std::size_t i = 0; i < r; ++i) qcoords[j][i] = Rational(-rel.coeffs[i + 1]) / Rational(rel.coeffs[0]);
    }
  }

  const std::size_t r = qbasis_inputs.size();
  if (L.exact_) {
    L.qbasis_real_.resize(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < r; ++i) L.qbasis_real_.row(static_cast<Eigen::Index>(i)) = freqs[qbasis_inputs[i]].real().transpose();
  }

  // Z-basis of the row lattice of the rational coordinate matrix.
  BigInt den = 1;
  for (const auto& q : qcoords)
    for (const auto& v : q) den = boost::multiprecision::lcm(den, denominator(v));
  IntMatrix scaled;
  for (const auto& q : qcoords) {
    std::vector<BigInt> row;
    for (const auto& v : q) row.push_back(numerator(Rational(v * den)));
    scaled.push_back(std::move(row));
  }
  RationalMatrix hnf_basis;  // N x r, in Q-basis coordinates
  for (const auto& row : hermite_rows(scaled, r)) {
    std::vector<Rational> b;
    for (const auto& v : row) b.push_back(Rational(v) / Rational(den));
    hnf_basis.push_back(std::move(b));
  }

  auto coords_for = [&](const RationalMatrix& basis_q) {
    const RationalMatrix inv = r ? invert(basis_q) : RationalMatrix{};
    std::vector<Exponent> coords;
    for (const auto& q : qcoords) {
      Exponent m(r);
      for (std::size_t k = 0; k < r; ++k) {
        Rational acc = 0;
        for (std::size_t i = 0; i < r; ++i) acc += q[i] * inv[i][k];
        m[k] = to_i64(acc);
      }
      coords.push_back(std::move(m));
    }
    return coords;
  };

  RationalMatrix chosen = hnf_basis;
  std::vector<Exponent> coords = coords_for(hnf_basis);

  // Tie-break candidate: the inputs that formed the Q-basis, when they
  // generate the whole group.
  if (r > 0) {
    RationalMatrix identity(r, std::vector<Rational>(r));
    for (std::size_t i = 0; i < r; ++i) identity[i][i] = 1;
    const Rational index = determinant(hnf_basis);
    if (abs(index) == 1) {
      std::vector<Exponent> alt = coords_for(identity);
      if (lex_smaller(alt, coords)) {
        chosen = identity;
        coords = std::move(alt);
      }
    }
  }

  L.coords_ = std::move(coords);
  L.basis_to_q_inv_ = r ? invert(chosen) : RationalMatrix{};
  L.basis_matrix_ = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < r; ++k) {
    if (L.exact_) {
      std::vector<ExactValue> comp(n);
      for (std::size_t i = 0; i < r; ++i) {
        if (chosen[k][i] == 0) continue;
        for (std::size_t c = 0; c < n; ++c)
          comp[c] += freqs[qbasis_inputs[i]].entries[c].exact_value * chosen[k][i];
      }
      L.basis_.push_back(frequency_from_exact(comp));
    } else {
      Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
      for (std::size_t i = 0; i < r; ++i)
        v += static_cast<double>(chosen[k][i]) * L.qbasis_real_.row(static_cast<Eigen::Index>(i)).transpose();
      L.basis_.push_back(frequency_from_real(v));
    }
    L.basis_matrix_.row(static_cast<Eigen::Index>(k)) = L.basis_.back().real().transpose();
  }
  return L;
}

std::optional<std::vector<Rational>> rational_coords(const Frequency& alpha, const FrequencyLattice& L) {
  if (alpha.dim() != L.n_) fail(ErrorCode::InvalidArgument, "frequency dimension differs from lattice dimension");
  const std::size_t r = L.rank();
  std::vector<Rational> q;
  if (L.exact_ && alpha.exact()) {
    std::vector<Rational> v(L.keys_.size());
    for (std::size_t c = 0; c < L.n_; ++c) {
      for (const auto& [d, coef] : alpha.entries[c].exact_value.terms()) {
        auto it = std::find(L.keys_.begin(), L.keys_.end(), std::make_pair(c, d));
        if (it == L.keys_.end()) return std::nullopt;
        v[static_cast<std::size_t>(it - L.keys_.begin())] = coef;
      }
    }
    auto sol = solve_left(L.qbasis_, v);
    if (!sol) return std::nullopt;
    q = *sol;
  } else {
    const Eigen::VectorXd a = alpha.real();
    if (a.cwiseAbs().maxCoeff() <= L.eps_) return std::vector<Rational>(r, Rational(0));
    if (r == 0) return std::nullopt;
    Eigen::MatrixXd rows(static_cast<Eigen::Index>(r + 1), static_cast<Eigen::Index>(L.n_));
    rows.row(0) = a.transpose();
    rows.bottomRows(static_cast<Eigen::Index>(r)) = L.qbasis_real_;
    const RelationSearch rel = find_integer_relation(rows, L.bound_, L.eps_);
    if (rel.status != RelationStatus::Found || rel.coeffs[0] == 0) return std::nullopt;
    q.resize(r);
    for (std::size_t i = 0; i < r; ++i) q[i] = Rational(-rel.coeffs[i + 1]) / Rational(rel.coeffs[0]);
  }
  std::vector<Rational> out(r);
  for (std::size_t k = 0; k < r; ++k) {
    Rational acc = 0;
    for (std::size_t i = 0; i < r; ++i) acc += q[i] * L.basis_to_q_inv_[i][k];
    out[k] = acc;
  }
  return out;
}

std::optional<Exponent> coords_of(const Frequency& alpha, const FrequencyLattice& L) {
  auto q = rational_coords(alpha, L);
  if (!q) return std::nullopt;
  Exponent m;
  for (const auto& v : *q) {
    if (denominator(v) != 1) return std::nullopt;
    m.push_back(to_i64(v));
  }
  if (!L.exact() || !alpha.exact()) {
    for (auto x : m)
      if (std::llabs(x) > L.bound()) return std::nullopt;
  }
  return m;
}

Commensurability is_commensurate(const Frequency& alpha, const FrequencyLattice& L, std::int64_t K) {
  if (K < 1) fail(ErrorCode::InvalidArgument, "K must be >= 1");
  Commensurability out;
  if (L.exact() && alpha.exact()) {
    auto q = rational_coords(alpha, L);
    if (!q) return out;
    BigInt k = 1;
    for (const auto& v : *q) k = boost::multiprecision::lcm(k, denominator(v));
    if (k <= K) {
      out.commensurate = true;
      out.witness = static_cast<std::int64_t>(k);
    }
    return out;
  }
  const Eigen::VectorXd a = alpha.real();
  if (a.cwiseAbs().maxCoeff() <= L.eps()) return {true, 1};
  const std::size_t r = L.rank();
  if (r == 0) return out;
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(r + 1), static_cast<Eigen::Index>(L.n()));
  rows.row(0) = a.transpose();
  rows.bottomRows(static_cast<Eigen::Index>(r)) = L.basis_matrix();
  const RelationSearch rel = find_integer_relation(rows, K, L.eps());
  if (rel.status != RelationStatus::Found || rel.coeffs[0] == 0) return out;
  const std::int64_t g = gcd_all(rel.coeffs);
  const std::int64_t k = std::llabs(rel.coeffs[0] / g);
  if (k <= K) {
    out.commensurate = true;
    out.witness = k;
  }
  return out;
}

bool has_integral_relation(const FrequencyLattice& L, std::int64_t K) {
  if (L.rank() < 2) return false;
  const RelationSearch rel = find_integer_relation(L.basis_matrix(), K, L.eps());
  return rel.status == RelationStatus::Found;
}

}  // namespace expsum
