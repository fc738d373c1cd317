#include "expsum/linear_program.hpp"

#include <limits>
#include <vector>

namespace expsum {

namespace {

constexpr double kEps = 1e-10;

// Tableau layout follows the classic dictionary form: rows 0..m-1 are
// constraints, row m the objective, row m+1 the phase-one objective.
class Simplex {
 public:
  Simplex(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c)
      : m_(A.rows()), n_(A.cols()), D_(Eigen::MatrixXd::Zero(m_ + 2, n_ + 2)),
        B_(static_cast<std::size_t>(m_)), N_(static_cast<std::size_t>(n_ + 1)) {
    for (Eigen::Index i = 0; i < m_; ++i)
      for (Eigen::Index j = 0; j < n_; ++j) D_(i, j) = A(i, j);
    for (Eigen::Index i = 0; i < m_; ++i) {
      B_[static_cast<std::size_t>(i)] = n_ + i;
      D_(i, n_) = -1.0;
      D_(i, n_ + 1) = b(i);
    }
    for (Eigen::Index j = 0; j < n_; ++j) {
      N_[static_cast<std::size_t>(j)] = j;
      D_(m_, j) = -c(j);
    }
    N_[static_cast<std::size_t>(n_)] = -1;
    D_(m_ + 1, n_) = 1.0;
  }

  LpResult solve() {
    LpResult out;
    Eigen::Index r = 0;
    for (Eigen::Index i = 1; i < m_; ++i)
      if (D_(i, n_ + 1) < D_(r, n_ + 1)) r = i;
    if (m_ > 0 && D_(r, n_ + 1) < -kEps) {
      pivot(r, n_);
      if (!run(1) || D_(m_ + 1, n_ + 1) < -kEps) {
        out.status = LpStatus::Infeasible;
        return out;
      }
      for (Eigen::Index i = 0; i < m_; ++i) {
        if (B_[static_cast<std::size_t>(i)] == -1) {
          Eigen::Index s = -1;
          for (Eigen::Index j = 0; j <= n_; ++j)
            if (s == -1 || D_(i, j) < D_(i, s) ||
                (D_(i, j) == D_(i, s) && N_[static_cast<std::size_t>(j)] < N_[static_cast<std::size_t>(s)]))
              s = j;
          pivot(i, s);
        }
      }
    }
    if (!run(2)) {
      out.status = LpStatus::Unbounded;
      return out;
    }
    out.status = LpStatus::Optimal;
    out.x = Eigen::VectorXd::Zero(n_);
    for (Eigen::Index i = 0; i < m_; ++i)
      if (B_[static_cast<std::size_t>(i)] < n_) out.x(B_[static_cast<std::size_t>(i)]) = D_(i, n_ + 1);
    out.value = D_(m_, n_ + 1);
    return out;
  }

 private:
  void pivot(Eigen::Index r, Eigen::Index s) {
    const double inv = 1.0 / D_(r, s);
    for (Eigen::Index i = 0; i < m_ + 2; ++i) {
      if (i == r) continue;
      const double f = D_(i, s) * inv;
      if (f == 0.0) continue;
      for (Eigen::Index j = 0; j < n_ + 2; ++j)
        if (j != s) D_(i, j) -= D_(r, j) * f;
      D_(i, s) = -f;
    }
    for (Eigen::Index j = 0; j < n_ + 2; ++j)
      if (j != s) D_(r, j) *= inv;
    D_(r, s) = inv;
    std::swap(B_[static_cast<std::size_t>(r)], N_[static_cast<std::size_t>(s)]);
  }

  bool run(int phase) {
    const Eigen::Index x = phase == 1 ? m_ + 1 : m_;
    for (int iter = 0; iter < 100000; ++iter) {
      Eigen::Index s = -1;
      for (Eigen::Index j = 0; j <= n_; ++j) {
        if (phase == 2 && N_[static_cast<std::size_t>(j)] == -1) continue;
        if (D_(x, j) < -kEps &&
            (s == -1 || N_[static_cast<std::size_t>(j)] < N_[static_cast<std::size_t>(s)]))
          s = j;
      }
      if (s == -1) return true;
      Eigen::Index r = -1;
      for (Eigen::Index i = 0; i < m_; ++i) {
        if (D_(i, s) < kEps) continue;
        if (r == -1) {
          r = i;
          continue;
        }
        const double lhs = D_(i, n_ + 1) / D_(i, s);
        const double rhs = D_(r, n_ + 1) / D_(r, s);
        if (lhs < rhs - kEps ||
            (lhs <= rhs + kEps && B_[static_cast<std::size_t>(i)] < B_[static_cast<std::size_t>(r)]))
          r = i;
      }
      if (r == -1) return false;
      pivot(r, s);
    }
    return true;
  }

  Eigen::Index m_, n_;
  Eigen::MatrixXd D_;
  std::vector<Eigen::Index> B_, N_;
};

}  // namespace

LpResult solve_lp(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c) {
  return Simplex(A, b, c).solve();
}

LpResult solve_bounded_lp(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
                          const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  // Substitute x = lo + u with 0 <= u <= hi - lo.
  const Eigen::Index m = A.rows();
  const Eigen::Index n = A.cols();
  Eigen::MatrixXd A2(m + n, n);
  Eigen::VectorXd b2(m + n);
  A2.topRows(m) = A;
  b2.head(m) = b - A * lo;
  A2.bottomRows(n) = Eigen::MatrixXd::Identity(n, n);
  b2.tail(n) = hi - lo;
  LpResult r = solve_lp(A2, b2, c);
  if (r.status == LpStatus::Optimal) {
    r.x += lo;
    r.value += c.dot(lo);
  }
  return r;
}

}  // namespace expsum

namespace expsum {

ConeFunctional max_min_functional(const Eigen::MatrixXd& rows) {
  const Eigen::Index k = rows.rows();
  const Eigen::Index d = rows.cols();
  ConeFunctional out;
  out.xi = Eigen::VectorXd::Zero(d);
  if (k == 0) {
    out.delta = std::numeric_limits<double>::infinity();
    return out;
  }
  double bound = 1.0;
  for (Eigen::Index i = 0; i < k; ++i) bound = std::max(bound, rows.row(i).cwiseAbs().sum());
  // Variables (xi, delta): delta - xi.row <= 0.
  Eigen::MatrixXd A(k, d + 1);
  A.leftCols(d) = -rows;
  A.col(d).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(k);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(d + 1);
  c(d) = 1.0;
  Eigen::VectorXd lo = Eigen::VectorXd::Constant(d + 1, -1.0);
  Eigen::VectorXd hi = Eigen::VectorXd::Constant(d + 1, 1.0);
  lo(d) = -bound;
  hi(d) = bound;
  const LpResult r = solve_bounded_lp(A, b, c, lo, hi);
  if (r.status != LpStatus::Optimal) {
    out.delta = -bound;
    return out;
  }
  out.xi = r.x.head(d);
  // Recompute delta from xi so callers get a value consistent with xi.
  out.delta = (rows * out.xi).minCoeff();
  return out;
}

}  // namespace expsum
