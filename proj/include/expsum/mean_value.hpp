#pragma once

#include "expsum/exp_algebra.hpp"
#include "expsum/gkh_formula.hpp"
#include "expsum/torus_lab.hpp"
#include "expsum/window.hpp"
#include "expsum/zero_finder.hpp"

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace expsum {

/// Sum of multiplicity * G(z) over zeros with Im z in the region.
Complex window_sum(const std::vector<ZeroRecord>& zeros, const ExpSum& G, const Region& W);

struct LambdaRow {
  double lambda = 0.0;
  Complex sum;
  double volume = 0.0;
  Complex estimate;
  std::size_t points = 0;       // zeros (with multiplicity) or isolated points in the window
};

struct MeanValueReport {
  std::vector<LambdaRow> rows;
  Complex extrapolated;         // average of the last two estimates
  double diagnostic = 0.0;      // max pairwise deviation over the last three estimates
  bool nonconvergent = false;
  std::optional<Complex> predicted;
  std::optional<double> discrepancy;
  std::vector<std::string> warnings;
  std::uint64_t seed = 0;
  double strip_R = 0.0;         // complex systems only
  std::vector<ZeroRecord> zeros;  // complex systems: everything found in the union of the windows
};

struct MeanValueOptions {
  ZeroFinderOptions zeros;
  IsolationOptions isolation;
  double convergence_tol = 1e-2;  // relative diagnostic above which the report is flagged
};

/// Mean value of G over the zeros of S (Im z in lambda * Omega).
MeanValueReport estimate_mean(const ExpSystem& S, const ExpSum& G, const WindowSpec& W,
                              const MeanValueOptions& opt = {});

/// Mean value of T over the isolated points of a semitrigonometric set.
MeanValueReport estimate_mean_real(const SemiTrigSet& V, const TrigPoly& T, const WindowSpec& W,
                                   const MeanValueOptions& opt = {});

struct Comparison {
  double abs_err = 0.0;
  double rel_err = 0.0;
  bool pass = false;
  bool extend_lambda = false;   // failed: rerun with a longer schedule before drawing conclusions
};

// Passes when |estimate - predicted| <= tol * max(1, |predicted|).
Comparison compare_prediction(MeanValueReport& report, const Prediction& pred, double tol);
Comparison compare_values(Complex estimate, Complex predicted, double tol);

void write_convergence_csv(std::ostream& os, const MeanValueReport& r);

}  // namespace expsum
