#pragma once

#include "expsum/freq_lattice.hpp"

#include <Eigen/Dense>

#include <complex>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace expsum {

using Complex = std::complex<double>;
using LatticePtr = std::shared_ptr<const FrequencyLattice>;

/// Finite sum  sum_m c_m exp(2*pi*alpha_m . z)  with exponents m stored as
/// exact integer coordinates in a shared frequency lattice (alpha_m = sum m_i A_i).
/// Zero coefficients are never stored.
class ExpSum {
 public:
  ExpSum() = default;
  ExpSum(LatticePtr lattice, std::map<Exponent, Complex> terms);

  static ExpSum constant(LatticePtr lattice, Complex c);
  static ExpSum monomial(LatticePtr lattice, const Exponent& m, Complex c = 1.0);

  const LatticePtr& lattice_ptr() const { return lattice_; }
  const FrequencyLattice& lattice() const { return *lattice_; }
  const std::map<Exponent, Complex>& terms() const { return terms_; }
  std::size_t n() const { return lattice_->n(); }
  std::size_t rank() const { return lattice_->rank(); }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  Complex coefficient(const Exponent& m) const;
  Complex constant_term() const { return coefficient(Exponent(rank(), 0)); }
  Eigen::VectorXd frequency(const Exponent& m) const { return lattice_->frequency_of(m); }

  ExpSum operator+(const ExpSum& o) const;
  ExpSum operator-(const ExpSum& o) const;
  ExpSum operator*(Complex s) const;
  // Multiplies by exp(2*pi*alpha_delta . z).
  ExpSum shifted(const Exponent& delta) const;
  // d/dz_k
  ExpSum derivative(std::size_t k) const;

  std::string to_string() const;

 private:
  LatticePtr lattice_;
  std::map<Exponent, Complex> terms_;
};

// Throws Error(LatticeMismatch) unless both sums live on the same lattice.
void require_same_lattice(const ExpSum& a, const ExpSum& b);

ExpSum multiply(const ExpSum& F, const ExpSum& G);

Complex evaluate(const ExpSum& F, std::span<const Complex> z);

/// Flattened form used in hot loops (zero finding, window sums).
class CompiledExpSum {
 public:
  CompiledExpSum() = default;
  explicit CompiledExpSum(const ExpSum& F);

  std::size_t n() const { return n_; }
  std::size_t size() const { return coefs_.size(); }
  const Eigen::MatrixXd& frequencies() const { return freqs_; }  // terms x n
  const std::vector<Complex>& coefficients() const { return coefs_; }

  Complex operator()(std::span<const Complex> z) const;
  // Value and gradient (d/dz_k) in one pass.
  Complex value_and_gradient(std::span<const Complex> z, std::span<Complex> grad) const;
  // Upper bound of |F| derivative size over a region with Re z_k in [lo_k, hi_k].
  double derivative_bound(std::span<const double> re_lo, std::span<const double> re_hi) const;
  double coefficient_scale() const;

 private:
  std::size_t n_ = 0;
  Eigen::MatrixXd freqs_;
  std::vector<Complex> coefs_;
};

/// n exponential sums in n variables over one lattice.
struct ExpSystem {
  std::vector<ExpSum> components;

  std::size_t n() const { return components.empty() ? 0 : components.front().n(); }
  const LatticePtr& lattice_ptr() const { return components.front().lattice_ptr(); }
  void validate() const;
};

// det(dF_j/dz_k) expanded symbolically (cofactor expansion).
ExpSum jacobian_det(const ExpSystem& S);

// True iff the frequency of m is a vertex of the convex hull of F's spectrum.
bool is_spectrum_vertex(const ExpSum& F, const Exponent& m);

struct VertexNormalization {
  ExpSum normalized;  // F / (d exp(2 pi alpha z)), constant term 1
  Complex d;
};

VertexNormalization normalize_at_vertex(const ExpSum& F, const Exponent& vertex);

struct ConstantTermReport {
  Complex value;
  std::size_t depth = 0;  // highest power of (1 - F~) used
  Eigen::VectorXd xi;     // positive functional on supp(1 - F~), in lattice coordinates
  double delta = 0.0;     // min of xi over supp(1 - F~)
};

/// Coefficient of exp(0) in H * sum_k (1 - Ft)^k, truncated at the first depth
/// beyond which no term can reach exponent 0. `extra_depth` adds powers
/// (the result must not change).
ConstantTermReport vertex_constant_term_report(const ExpSum& Ft, const ExpSum& H, std::size_t extra_depth = 0);

Complex vertex_constant_term(const ExpSum& Ft, const ExpSum& H, std::size_t extra_depth = 0);

/// Quasiperiodic trigonometric polynomial  sum c_k cos(2 pi a_k x) + d_k sin(2 pi a_k x).
struct TrigTerm {
  Frequency alpha;
  double c = 0.0;
  double d = 0.0;
};

class TrigPoly {
 public:
  TrigPoly() = default;
  TrigPoly(std::size_t n, std::vector<TrigTerm> terms);

  std::size_t n() const { return n_; }
  const std::vector<TrigTerm>& terms() const { return terms_; }
  const Eigen::MatrixXd& frequencies() const { return freqs_; }

  double operator()(const Eigen::VectorXd& x) const;
  double value_gradient(const Eigen::VectorXd& x, Eigen::VectorXd& grad) const;
  double value_gradient_hessian(const Eigen::VectorXd& x, Eigen::VectorXd& grad, Eigen::MatrixXd& hess) const;
  double max_frequency() const;
  double coefficient_scale() const;
  bool is_zero() const { return terms_.empty(); }

 private:
  std::size_t n_ = 0;
  std::vector<TrigTerm> terms_;
  Eigen::MatrixXd freqs_;
};

// T(x) equals the returned ExpSum evaluated at z = i x.
ExpSum trig_to_expsum(const TrigPoly& T, const LatticePtr& lattice);
// Inverse of trig_to_expsum for conjugate-symmetric sums.
TrigPoly expsum_to_trig(const ExpSum& F);

}  // namespace expsum
