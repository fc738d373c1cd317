#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace expsum {

enum class RelationStatus { Found, None, Undecidable };

struct RelationSearch {
  RelationStatus status = RelationStatus::None;
  std::vector<std::int64_t> coeffs;  // valid when status == Found
  double residual = 0.0;             // best residual among candidates with |k| <= K
};

/// Searches for a nonzero integer vector k, max|k_i| <= bound, with
/// sum_i k_i * rows(i) = 0 (rows are points of R^n), by LLL reduction of the
/// lattice [I | W*X].
///
/// A candidate is accepted when its residual is at most eps * max(1, sum|k_i|*|x_i|).
/// A best residual within a factor 100 above that threshold is reported as
/// Undecidable instead of being silently classified.
RelationSearch find_integer_relation(const Eigen::MatrixXd& rows, std::int64_t bound, double eps);

// LLL-reduces the rows of `basis` in place (delta = 0.99).
void lll_reduce(Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>& basis, long double delta = 0.99L);

}  // namespace expsum
