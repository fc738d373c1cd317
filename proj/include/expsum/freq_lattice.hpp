#pragma once

#include "expsum/exact.hpp"
#include "expsum/frequency_expr.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace expsum {

using Exponent = std::vector<std::int64_t>;

/// A real frequency vector in R^n; each entry keeps its exactness tag.
struct Frequency {
  std::vector<FrequencyValue> entries;

  std::size_t dim() const { return entries.size(); }
  bool exact() const;
  Eigen::VectorXd real() const;
  std::string to_string() const;
};

// Parses one expression per component, e.g. {"1", "sqrt(2)/3"}.
Frequency parse_frequency(const std::vector<std::string>& components);
Frequency frequency_from_exact(const std::vector<ExactValue>& components);
Frequency frequency_from_real(const Eigen::VectorXd& v);

using RationalMatrix = std::vector<std::vector<Rational>>;

/// Z-basis A_1..A_N of the group generated by a finite set of frequencies,
/// together with the integer coordinates of every input.
class FrequencyLattice {
 public:
  std::size_t n() const { return n_; }
  std::size_t rank() const { return basis_.size(); }
  bool exact() const { return exact_; }
  std::int64_t bound() const { return bound_; }
  double eps() const { return eps_; }

  const std::vector<Frequency>& basis() const { return basis_; }
  // N x n matrix whose rows are the basis frequencies.
  const Eigen::MatrixXd& basis_matrix() const { return basis_matrix_; }
  const std::vector<Frequency>& inputs() const { return inputs_; }
  const std::vector<Exponent>& input_coords() const { return coords_; }

  // sum_i m_i A_i
  Eigen::VectorXd frequency_of(const Exponent& m) const;
  // Exact value of sum_i m_i A_i (exact lattices only).
  std::vector<ExactValue> exact_frequency_of(const Exponent& m) const;

  std::string describe() const;

 private:
  friend FrequencyLattice find_basis(const std::vector<Frequency>&, std::int64_t, double);
  friend std::optional<std::vector<Rational>> rational_coords(const Frequency&, const FrequencyLattice&);

  std::size_t n_ = 0;
  bool exact_ = true;
  std::int64_t bound_ = 50;
  double eps_ = 1e-9;
  std::vector<Frequency> basis_;
  Eigen::MatrixXd basis_matrix_;
  std::vector<Frequency> inputs_;
  std::vector<Exponent> coords_;

  // Exact mode: Q-basis vectors in (component, radicand) coordinates.
  std::vector<std::pair<std::size_t, std::int64_t>> keys_;
  RationalMatrix qbasis_;          // r x |keys|
  Eigen::MatrixXd qbasis_real_;    // r x n
  RationalMatrix basis_to_q_inv_;  // inverse of the Z-basis expressed in the Q-basis
};

/// Deterministic: exact inputs are handled symbolically, decimal inputs by
/// integer-relation search with coefficient bound K and tolerance eps.
FrequencyLattice find_basis(const std::vector<Frequency>& freqs, std::int64_t K = 50, double eps = 1e-9);

/// Coordinates of alpha in the lattice basis, or nullopt when alpha is not
/// an integral combination (within the lattice's coefficient bound).
std::optional<Exponent> coords_of(const Frequency& alpha, const FrequencyLattice& lattice);

// Rational coordinates in the Z-basis when alpha lies in the Q-span.
std::optional<std::vector<Rational>> rational_coords(const Frequency& alpha, const FrequencyLattice& lattice);

struct Commensurability {
  bool commensurate = false;
  std::int64_t witness = 0;  // smallest k >= 1 with k*alpha in the lattice
};

Commensurability is_commensurate(const Frequency& alpha, const FrequencyLattice& lattice, std::int64_t K);

/// True when some integer vector k, 0 < max|k_i| <= K, satisfies sum k_i A_i = 0.
bool has_integral_relation(const FrequencyLattice& lattice, std::int64_t K);

}  // namespace expsum
