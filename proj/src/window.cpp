#include "expsum/window.hpp"

#include "expsum/error.hpp"

#include <cmath>
#include <numbers>

namespace expsum {

double Region::volume() const {
  const std::size_t n = dim();
  if (shape == WindowShape::Box) {
    double v = 1.0;
    for (double h : half) v *= 2.0 * h;
    return v;
  }
  const double nd = static_cast<double>(n);
  return std::pow(std::numbers::pi, nd / 2.0) / std::tgamma(nd / 2.0 + 1.0) * std::pow(half.front(), nd);
}

bool Region::contains(const Eigen::VectorXd& y) const {
  if (shape == WindowShape::Box) {
    for (std::size_t k = 0; k < dim(); ++k)
      if (std::abs(y(static_cast<Eigen::Index>(k)) - center[k]) > half[k]) return false;
    return true;
  }
  double r2 = 0.0;
  for (std::size_t k = 0; k < dim(); ++k) {
    const double d = y(static_cast<Eigen::Index>(k)) - center[k];
    r2 += d * d;
  }
  return std::sqrt(r2) <= half.front();
}

Region Region::shrunk(double collar) const {
  Region r = *this;
  for (auto& h : r.half) h = std::max(0.0, h - collar);
  return r;
}

std::vector<std::pair<double, double>> Region::bounding_box() const {
  std::vector<std::pair<double, double>> out;
  for (std::size_t k = 0; k < dim(); ++k) {
    const double h = shape == WindowShape::Box ? half[k] : half.front();
    out.emplace_back(center[k] - h, center[k] + h);
  }
  return out;
}

void WindowSpec::validate() const {
  if (center.empty()) fail(ErrorCode::InvalidArgument, "window needs a center");
  if (shape == WindowShape::Box && half.size() != center.size())
    fail(ErrorCode::InvalidArgument, "box window needs one half extent per axis");
  if (shape == WindowShape::Ball && half.empty()) fail(ErrorCode::InvalidArgument, "ball window needs a radius");
  for (double h : half)
    if (!(h > 0) || !std::isfinite(h)) fail(ErrorCode::InvalidArgument, "window extents must be positive");
  for (double c : center)
    if (!std::isfinite(c)) fail(ErrorCode::InvalidArgument, "window center must be finite");
  if (!(lambda0 > 0) || !(ratio > 1.0)) fail(ErrorCode::InvalidArgument, "schedule needs lambda0 > 0 and ratio > 1");
}

std::vector<double> WindowSpec::lambdas() const {
  std::vector<double> out;
  double l = lambda0;
  for (std::size_t j = 0; j <= J; ++j, l *= ratio) out.push_back(l);
  return out;
}

Region WindowSpec::at(double lambda) const {
  Region r;
  r.shape = shape;
  for (double c : center) r.center.push_back(lambda * c);
  if (shape == WindowShape::Ball) {
    r.half.assign(center.size(), lambda * half.front());
  } else {
    for (double h : half) r.half.push_back(lambda * h);
  }
  return r;
}

}  // namespace expsum
