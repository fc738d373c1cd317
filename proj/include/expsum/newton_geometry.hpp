#pragma once

#include "expsum/exp_algebra.hpp"

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace expsum {

/// Convex polytope given by its vertices. When built from an exponential sum
/// every vertex carries its lattice coordinates, so ties can be settled exactly.
struct Polytope {
  std::size_t n = 0;
  std::vector<Eigen::VectorXd> vertices;  // 2D: counter-clockwise; otherwise lexicographic
  std::vector<Exponent> tags;             // empty or one per vertex
  LatticePtr lattice;                     // may be null for untagged polytopes
  std::size_t dim = 0;                    // affine dimension

  bool is_point() const { return vertices.size() == 1; }
  double diameter() const;
  bool tagged() const { return !tags.empty(); }
};

// Convex hull of the given points (duplicates merged).
Polytope convex_hull(const std::vector<Eigen::VectorXd>& points, const std::vector<Exponent>& tags = {},
                     LatticePtr lattice = nullptr);

Polytope newton_polytope(const ExpSum& F);

struct MinkowskiDecomposition {
  Polytope total;
  // provenance[v][j] = index of the vertex of summand j used by total vertex v.
  std::vector<std::vector<std::size_t>> provenance;
};

MinkowskiDecomposition minkowski_sum(const std::vector<Polytope>& polys);

struct CoordinatedCollection {
  std::vector<std::vector<std::size_t>> faces;  // vertex indices of each face
  Eigen::VectorXd witness;
};

struct DevelopedCheck {
  bool developed = true;
  std::optional<CoordinatedCollection> witness;  // set when not developed
};

DevelopedCheck is_developed(const std::vector<Polytope>& polys);

// Indices of the vertices of P maximizing xi (relative tolerance 1e-9).
std::vector<std::size_t> maximizing_face(const Polytope& P, const Eigen::VectorXd& xi);

// n-dimensional volume, n <= 3 (0 when not full-dimensional).
double volume(const Polytope& P);

// Normalized so that mixed_volume(P, ..., P) = volume(P); n <= 3.
double mixed_volume(const std::vector<Polytope>& polys);

}  // namespace expsum
