#pragma once

#include "expsum/exp_algebra.hpp"

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace expsum {

struct ZeroRecord {
  std::vector<Complex> z;
  int multiplicity = 1;
  bool multiplicity_unverified = false;  // always set for n >= 2
  double residual = 0.0;                 // max_j |F_j(z)|
  double jacobian_condition = 1.0;
};

struct ZeroFinderOptions {
  double tau_res = 1e-10;      // residual bound, relative to the size of the largest term at z
  double tau_sep = 1e-6;       // dedup distance, relative to the window diameter
  double tau_bdry = 1e-12;     // |F| below this (relative) on a contour counts as a boundary zero
  double strip_margin = 0.25;
  double r_max = 64.0;
  double start_factor = 32.0;  // multistart points per expected zero
  double cover_tol = 0.1;      // relative density deviation that raises IncompleteCover
  std::uint64_t seed = 20240601;
};

struct StripValidation {
  double R = 0.0;
  double bound = 0.0;          // largest certified radius before the margin
  std::size_t directions = 0;
  std::size_t samples = 0;     // shell points checked during validation
  std::size_t doublings = 0;
};

/// Radius R such that every point with |Re z| >= R has one component
/// dominated by a single term (so no zeros there). Requires a developed system.
StripValidation strip_radius(const ExpSystem& S, const ZeroFinderOptions& opt = {});

struct Rect {
  double re_lo, re_hi, im_lo, im_hi;
};

// Winding number of F along the boundary of rect; throws BoundaryZero when
// F (nearly) vanishes on the contour.
int count_zeros_rect_1d(const ExpSum& F, const Rect& rect, const ZeroFinderOptions& opt = {});

struct StripBox {
  double R = 1.0;
  std::vector<std::pair<double, double>> window;  // Im range per variable
};

struct ZeroSearch {
  std::vector<ZeroRecord> zeros;  // sorted by imaginary then real parts
  std::vector<std::string> warnings;
  std::vector<std::string> nudges;
  StripBox box;                   // window actually used (after nudges)
  std::size_t starts = 0;
  double expected = 0.0;          // n! MV Vol(window) for n >= 2, winding count for n = 1
};

ZeroSearch locate_zeros(const ExpSystem& S, const StripBox& box, const ZeroFinderOptions& opt = {});

void write_zeros_csv(std::ostream& os, const std::vector<ZeroRecord>& zeros, std::size_t n);

}  // namespace expsum
