#include "expsum/integer_relation.hpp"

#include <cmath>
#include <limits>

namespace expsum {

using MatL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;

void lll_reduce(MatL& b, long double delta) {
  const Eigen::Index m = b.rows();
  if (m < 2) return;
  MatL bstar(m, b.cols());
  MatL mu = MatL::Zero(m, m);
  Eigen::Matrix<long double, Eigen::Dynamic, 1> norms(m);

  auto gram_schmidt = [&]() {
    for (Eigen::Index i = 0; i < m; ++i) {
      bstar.row(i) = b.row(i);
      for (Eigen::Index j = 0; j < i; ++j) {
        mu(i, j) = norms(j) > 0 ? b.row(i).dot(bstar.row(j)) / norms(j) : 0.0L;
        bstar.row(i) -= mu(i, j) * bstar.row(j);
      }
      norms(i) = bstar.row(i).squaredNorm();
    }
  };

  gram_schmidt();
  Eigen::Index k = 1;
  int guard = 0;
  while (k < m && guard++ < 100000) {
    for (Eigen::Index j = k - 1; j >= 0; --j) {
      const long double q = std::round(mu(k, j));
      if (q != 0.0L) {
        b.row(k) -= q * b.row(j);
        for (Eigen::Index l = 0; l <= j; ++l) mu(k, l) -= q * (l == j ? 1.0L : mu(j, l));
      }
    }
    if (norms(k) >= (delta - mu(k, k - 1) * mu(k, k - 1)) * norms(k - 1)) {
      ++k;
    } else {
      b.row(k).swap(b.row(k - 1));
      gram_schmidt();
      k = std::max<Eigen::Index>(k - 1, 1);
    }
  }
}

RelationSearch find_integer_relation(const Eigen::MatrixXd& rows, std::int64_t bound, double eps) {
  RelationSearch out;
  const Eigen::Index m = rows.rows();
  const Eigen::Index n = rows.cols();
  if (m == 0) return out;

  long double scale = 1.0L;
  for (Eigen::Index i = 0; i < m; ++i) {
    scale = std::max<long double>(scale, rows.row(i).cwiseAbs().maxCoeff());
  }
  const long double weight = 1.0L / (static_cast<long double>(eps) * scale);

  MatL basis = MatL::Zero(m, m + n);
  for (Eigen::Index i = 0; i < m; ++i) {
    basis(i, i) = 1.0L;
    for (Eigen::Index c = 0; c < n; ++c) basis(i, m + c) = weight * static_cast<long double>(rows(i, c));
  }
  lll_reduce(basis);

  long double best_ratio = std::numeric_limits<long double>::infinity();
  std::int64_t best_height = std::numeric_limits<std::int64_t>::max();
  for (Eigen::Index r = 0; r < m; ++r) {
    std::vector<std::int64_t> k(static_cast<std::size_t>(m));
    std::int64_t height = 0;
    bool overflow = false;
    for (Eigen::Index i = 0; i < m; ++i) {
      const long double v = std::round(basis(r, i));
      if (std::fabs(v) > 1e15L) { overflow = true; break; }
      k[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(v);
      height = std::max<std::int64_t>(height, std::llabs(k[static_cast<std::size_t>(i)]));
    }
    if (overflow || height == 0 || height > bound) continue;

    long double residual = 0.0L;
    long double weight_sum = 0.0L;
    for (Eigen::Index c = 0; c < n; ++c) {
      long double acc = 0.0L;
      for (Eigen::Index i = 0; i < m; ++i) acc += static_cast<long double>(k[static_cast<std::size_t>(i)]) * rows(i, c);
      residual = std::max(residual, std::fabs(acc));
    }
    for (Eigen::Index i = 0; i < m; ++i) {
      weight_sum += std::llabs(k[static_cast<std::size_t>(i)]) * static_cast<long double>(rows.row(i).cwiseAbs().maxCoeff());
    }
    const long double threshold = static_cast<long double>(eps) * std::max<long double>(1.0L, weight_sum);
    const long double ratio = residual / threshold;
    if (ratio < best_ratio || (ratio <= 1.0L && best_ratio <= 1.0L && height < best_height)) {
      if (ratio <= 1.0L || best_ratio > 1.0L) {
        best_ratio = ratio;
        best_height = height;
        out.coeffs = k;
        out.residual = static_cast<double>(residual);
      }
    }
  }

  if (best_ratio <= 1.0L) {
    out.status = RelationStatus::Found;
  } else if (best_ratio <= 100.0L) {
    out.status = RelationStatus::Undecidable;
    out.coeffs.clear();
  } else {
    out.status = RelationStatus::None;
    out.coeffs.clear();
  }
  return out;
}

}  // namespace expsum
