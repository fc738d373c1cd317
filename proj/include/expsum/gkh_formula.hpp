#pragma once

#include "expsum/exp_algebra.hpp"
#include "expsum/newton_geometry.hpp"

#include <map>
#include <optional>
#include <vector>

namespace expsum {

// Integer weight per vertex of the Minkowski sum, keyed by lattice coordinates.
using CoefficientMap = std::map<Exponent, std::int64_t>;

struct VertexContribution {
  Exponent vertex;
  Eigen::VectorXd frequency;
  std::vector<std::size_t> provenance;  // summand vertex per component
  Complex d;                            // coefficient of F = F_1...F_n at the vertex
  Complex C;                            // constant term of H / F~
  std::int64_t k = 0;
  Complex term;                         // k * C
};

struct Prediction {
  Complex total;
  std::vector<VertexContribution> contributions;  // sorted by vertex coordinates
  std::size_t n = 0;
  LatticePtr lattice;
};

// Endpoint weights of a nondegenerate segment in R^1: +1 at the lower end,
// -1 at the upper end, aligned with P.vertices (which are sorted ascending).
std::vector<std::int64_t> combinatorial_coefficients_1d(const Polytope& segment);

/// (-2 pi)^{-n} sum_alpha k_alpha C_alpha over the vertices of the Minkowski sum
/// of the components' Newton polytopes. For n >= 2 `k` must name every vertex.
Prediction predict_mean(const ExpSystem& S, const ExpSum& G, const std::optional<CoefficientMap>& k = std::nullopt);

// Describes a failed developed check, e.g. "faces {0,1} | {0,1} under xi=(1,1)".
std::string describe_witness(const CoordinatedCollection& c);

}  // namespace expsum
