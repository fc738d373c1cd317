#pragma once

// Per-period root sums for integer-frequency exponential sums in one variable.
// With w = exp(2 pi z), F = sum_k c_k w^k has one zero per unit of Im z for
// every nonzero root w of the Laurent polynomial, so the mean of G = w^m over
// zeros is sum over roots of w^m.

#include <Eigen/Eigenvalues>

#include <complex>
#include <map>
#include <vector>

namespace oracle {

// Roots of sum_k c[k] w^k, k from the smallest to the largest key, with the
// w^lowest factor removed. Both extreme coefficients must be nonzero.
inline std::vector<std::complex<double>> laurent_roots(const std::map<int, std::complex<double>>& c) {
  const int lo = c.begin()->first, hi = c.rbegin()->first;
  const int deg = hi - lo;
  std::vector<std::complex<double>> roots;
  if (deg == 0) return roots;
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(deg, deg);
  const std::complex<double> lead = c.rbegin()->second;
  for (int i = 1; i < deg; ++i) M(i, i - 1) = 1.0;
  for (int i = 0; i < deg; ++i) {
    auto it = c.find(lo + i);
    const std::complex<double> ci = it == c.end() ? 0.0 : it->second;
    M(i, deg - 1) = -ci / lead;
  }
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(M);
  for (int i = 0; i < deg; ++i) roots.push_back(es.eigenvalues()(i));
  return roots;
}

inline std::complex<double> root_power_sum(const std::map<int, std::complex<double>>& c, int m) {
  std::complex<double> s = 0.0;
  for (const auto& w : laurent_roots(c)) s += std::pow(w, m);
  return s;
}

}  // namespace oracle
