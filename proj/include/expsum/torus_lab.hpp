#pragma once

#include "expsum/exp_algebra.hpp"
#include "expsum/freq_lattice.hpp"
#include "expsum/window.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace expsum {

enum class LiftMode { Real, Complex };

/// Linear orbit of R^n (or C^n) on a torus built from lattice pairings.
/// Real mode: phi = phi0 + Phi x on T^N with Phi rows A_i.
/// Complex mode: T^(n+N), the first n angles are Re z shifted and rescaled
/// into [1/4, 3/4] (Phi0), the remaining N are A_i . Im z (Phi1).
struct OrbitLift {
  LiftMode mode = LiftMode::Real;
  std::size_t n = 0;
  std::size_t N = 0;            // lattice rank
  std::size_t torus_dim = 0;
  std::size_t orbit_dim = 0;
  Eigen::MatrixXd Phi;          // torus_dim x n (real) or torus_dim x 2n acting on (Re z, Im z)
  Eigen::VectorXd phi0;
  double R = 0.0;
  bool dense = false;           // no integral k with |k|_inf <= K orthogonal to the orbit
  bool periodic = false;        // N == n
  std::int64_t K = 0;

  // Torus point over x (real mode) or over (Re z, Im z) stacked (complex mode), reduced mod 1.
  Eigen::VectorXd angles(const Eigen::VectorXd& x) const;
};

OrbitLift build_lift(const FrequencyLattice& L, LiftMode mode, double R = 0.0, std::int64_t K = 50,
                     std::optional<Eigen::VectorXd> phi0 = std::nullopt);

/// Trigonometric polynomial in torus angles:  sum c cos(2 pi k.phi) + d sin(2 pi k.phi).
struct TorusTerm {
  Exponent k;
  double c = 0.0;
  double d = 0.0;
};

class TorusTrig {
 public:
  TorusTrig() = default;
  TorusTrig(std::size_t dim, std::vector<TorusTerm> terms);

  std::size_t dim() const { return dim_; }
  const std::vector<TorusTerm>& terms() const { return terms_; }
  double operator()(const Eigen::VectorXd& phi) const;
  double value_gradient(const Eigen::VectorXd& phi, Eigen::VectorXd& grad) const;
  double integral() const;  // torus mean: sum of c over k = 0
  double coefficient_scale() const;
  int max_order() const;    // max |k|_inf

 private:
  std::size_t dim_ = 0;
  std::vector<TorusTerm> terms_;
};

// T(x) = f(Phi x) for a real lift through the origin.
TrigPoly pull_back(const TorusTrig& f, const FrequencyLattice& L);
// Inverse of pull_back; throws LatticeMismatch when a frequency is not in L.
TorusTrig push_forward(const TrigPoly& T, const FrequencyLattice& L);

struct WeylRow {
  double lambda = 0.0;
  double average = 0.0;
  double exact = 0.0;
  double abs_err = 0.0;
};

/// (1/Vol) of the integral of f(phi0 + Phi x) over lambda*Omega, by composite
/// Gauss-Legendre quadrature, for every lambda of the schedule.
std::vector<WeylRow> orbit_average(const TorusTrig& f, const OrbitLift& lift, const WindowSpec& W);

void write_weyl_csv(std::ostream& os, const std::vector<WeylRow>& rows);

/// Union of clauses; each clause is {E_1 = 0, ..., P_1 > 0, ...}.
struct SemiTrigClause {
  std::vector<TrigPoly> equalities;
  std::vector<TrigPoly> positives;
};

struct SemiTrigSet {
  std::size_t n = 0;
  std::vector<SemiTrigClause> clauses;
};

struct IsolatedPoint {
  Eigen::VectorXd x;
  double value = 0.0;  // T(x)
};

struct IsolationOptions {
  double tau_res = 1e-10;        // relative residual for equalities
  double tau_iso = 1e-4;         // radius of the sign test, in units of the shortest period
  std::size_t samples_1d = 16;   // grid points per shortest period
  std::size_t samples_2d = 6;
};

struct IsolatedPointSet {
  std::vector<IsolatedPoint> points;
  std::vector<IsolatedPoint> undecided;
};

/// Isolated points of V inside the region (n <= 2). Points whose isolation
/// cannot be settled by the local sign test go to `undecided`.
IsolatedPointSet isolated_points(const SemiTrigSet& V, const TrigPoly& T, const Region& W,
                                 const IsolationOptions& opt = {});

struct PeriodicMean {
  double value = 0.0;
  std::size_t points = 0;        // isolated points in one fundamental domain
  double cell_volume = 0.0;
};

/// Closed form for N == n: sum of T over isolated points in one fundamental
/// domain of Phi, divided by the domain's volume.
PeriodicMean periodic_mean(const SemiTrigSet& V, const TrigPoly& T, const OrbitLift& lift,
                           const IsolationOptions& opt = {});

/// Subset of T^N given by N - n equalities and optional positivity constraints.
struct TorusSet {
  std::size_t N = 0;
  std::vector<TorusTrig> equalities;
  std::vector<TorusTrig> positives;
};

struct TransversalOptions {
  double max_step = 1e-3;
  double min_step = 1e-10;
  double tangency = 1e-8;        // |tangent component along the orbit| > 1 - tangency is excluded
  std::size_t seed_lines = 0;    // per axis; 0 picks from the equation degrees
};

struct CurveSample {
  std::size_t component = 0;
  Eigen::VectorXd phi;
  double density = 0.0;          // |omega(tangent)|
  double integrand = 0.0;        // T~ * density, 0 where a positivity constraint fails
};

struct TransversalResult {
  double value = 0.0;
  double length = 0.0;
  std::size_t components = 0;
  std::size_t excluded = 0;      // samples dropped by the tangency rule
  std::vector<CurveSample> samples;
};

/// Integral of T~ |omega| over the curve V~ (N - n = 1), omega(v) = det(v, A^1, ..., A^n)
/// with A^j the orbit directions. Throws TracingStalled on singular level sets.
TransversalResult transversal_volume_curve(const TorusSet& V, const TorusTrig& T, const OrbitLift& lift,
                                           const TransversalOptions& opt = {});

void write_curve_csv(std::ostream& os, const TransversalResult& r);

}  // namespace expsum
