#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <utility>
#include <vector>

namespace expsum {

enum class WindowShape { Box, Ball };

// A concrete region of R^n: box with per-axis half extents, or ball of radius half[0].
struct Region {
  WindowShape shape = WindowShape::Box;
  std::vector<double> center;
  std::vector<double> half;

  std::size_t dim() const { return center.size(); }
  double volume() const;
  bool contains(const Eigen::VectorXd& y) const;  // closed region
  Region shrunk(double collar) const;             // empty regions keep zero extents
  std::vector<std::pair<double, double>> bounding_box() const;
};

/// Omega together with the schedule lambda_j = lambda0 * ratio^j, j = 0..J.
/// lambda * Omega scales both the center and the extents.
struct WindowSpec {
  WindowShape shape = WindowShape::Box;
  std::vector<double> center;
  std::vector<double> half;
  double lambda0 = 10.0;
  double ratio = 2.0;
  std::size_t J = 6;

  void validate() const;
  std::vector<double> lambdas() const;
  Region at(double lambda) const;
};

}  // namespace expsum
