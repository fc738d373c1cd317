#pragma once

#include <Eigen/Dense>

namespace expsum {

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  double value = 0.0;
  Eigen::VectorXd x;
};

// maximize c.x subject to A x <= b, x >= 0. Dense two-phase simplex with
// Bland's rule; intended for the handful of variables used by cone tests.
LpResult solve_lp(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c);

// maximize c.x subject to A x <= b, lo <= x <= hi (finite bounds).
LpResult solve_bounded_lp(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
                          const Eigen::VectorXd& lo, const Eigen::VectorXd& hi);

}  // namespace expsum

namespace expsum {

// Functional xi with |xi_i| <= 1 maximizing delta = min_k xi . rows(k).
// delta > 0 iff the rows lie in an open half-space (a pointed cone).
struct ConeFunctional {
  Eigen::VectorXd xi;
  double delta = 0.0;
};

ConeFunctional max_min_functional(const Eigen::MatrixXd& rows);

}  // namespace expsum
