#include "expsum/mean_value.hpp"

#include "expsum/error.hpp"
#include "expsum/parallel.hpp"
#include "format.hpp"

#include <algorithm>
#include <cmath>

namespace expsum {

namespace {

void check_schedule(const WindowSpec& W, std::size_t n) {
  W.validate();
  if (W.J < 4) fail(ErrorCode::InvalidArgument, "schedule needs J >= 4");
  if (W.center.size() != n) fail(ErrorCode::InvalidArgument, "window dimension differs from the system");
}

// Bounding box of every window in the schedule, padded so edge nudges never cut a window.
Region union_box(const WindowSpec& W) {
  std::vector<std::pair<double, double>> box;
  for (double lambda : W.lambdas()) {
    const auto b = W.at(lambda).bounding_box();
    if (box.empty()) box = b;
    for (std::size_t k = 0; k < b.size(); ++k) {
      box[k].first = std::min(box[k].first, b[k].first);
      box[k].second = std::max(box[k].second, b[k].second);
    }
  }
  Region r;
  for (const auto& [lo, hi] : box) {
    const double pad = 1e-3 * (hi - lo);
    r.center.push_back(0.5 * (lo + hi));
    r.half.push_back(0.5 * (hi - lo) + pad);
  }
  return r;
}

Eigen::VectorXd imag_part(const std::vector<Complex>& z) {
  Eigen::VectorXd y(static_cast<Eigen::Index>(z.size()));
  for (std::size_t k = 0; k < z.size(); ++k) y(static_cast<Eigen::Index>(k)) = z[k].imag();
  return y;
}

void finalize(MeanValueReport& r, const MeanValueOptions& opt) {
  const std::size_t k = r.rows.size();
  r.extrapolated = 0.5 * (r.rows[k - 1].estimate + r.rows[k - 2].estimate);
  r.diagnostic = 0.0;
  for (std::size_t i = k - 3; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) r.diagnostic = std::max(r.diagnostic, std::abs(r.rows[i].estimate - r.rows[j].estimate));
  r.nonconvergent = r.diagnostic > opt.convergence_tol * std::max(1.0, std::abs(r.extrapolated));
  if (r.nonconvergent)
    r.warnings.push_back("NonConvergent: tail deviation " + fmt(r.diagnostic) + " exceeds the convergence tolerance");
}

}  // namespace

Complex window_sum(const std::vector<ZeroRecord>& zeros, const ExpSum& G, const Region& W) {
  const CompiledExpSum g(G);
  Complex s = 0.0;
  for (const auto& z : zeros)
    if (W.contains(imag_part(z.z))) s += static_cast<double>(z.multiplicity) * g(z.z);
  return s;
}

MeanValueReport estimate_mean(const ExpSystem& S, const ExpSum& G, const WindowSpec& W, const MeanValueOptions& opt) {
  S.validate();
  check_schedule(W, S.n());
  require_same_lattice(S.components.front(), G);
  MeanValueReport rep;
  rep.seed = opt.zeros.seed;
  rep.strip_R = strip_radius(S, opt.zeros).R;
  const Region all = union_box(W);
  auto search = locate_zeros(S, StripBox{rep.strip_R, all.bounding_box()}, opt.zeros);
  for (const auto& w : search.warnings) rep.warnings.push_back(w);

  const auto lambdas = W.lambdas();
  rep.rows.resize(lambdas.size());
  parallel_for(lambdas.size(), [&](std::size_t j) {
    const Region r = W.at(lambdas[j]);
    LambdaRow& row = rep.rows[j];
    row.lambda = lambdas[j];
    row.sum = window_sum(search.zeros, G, r);
    row.volume = r.volume();
    row.estimate = row.sum / row.volume;
    for (const auto& z : search.zeros)
      if (r.contains(imag_part(z.z))) row.points += static_cast<std::size_t>(z.multiplicity);
  });
  finalize(rep, opt);
  rep.zeros = std::move(search.zeros);
  return rep;
}

MeanValueReport estimate_mean_real(const SemiTrigSet& V, const TrigPoly& T, const WindowSpec& W,
                                   const MeanValueOptions& opt) {
  check_schedule(W, V.n);
  MeanValueReport rep;
  const auto found = isolated_points(V, T, union_box(W), opt.isolation);
  const auto lambdas = W.lambdas();
  rep.rows.resize(lambdas.size());
  std::vector<std::size_t> undecided(lambdas.size(), 0);
  parallel_for(lambdas.size(), [&](std::size_t j) {
    const Region r = W.at(lambdas[j]);
    LambdaRow& row = rep.rows[j];
    row.lambda = lambdas[j];
    double s = 0.0;
    for (const auto& p : found.points)
      if (r.contains(p.x)) {
        s += p.value;
        ++row.points;
      }
    for (const auto& p : found.undecided) undecided[j] += r.contains(p.x);
    row.sum = s;
    row.volume = r.volume();
    row.estimate = row.sum / row.volume;
  });
  for (std::size_t j = 0; j < lambdas.size(); ++j)
    if (undecided[j] > 0)
      rep.warnings.push_back("IsolationUndecided: " + std::to_string(undecided[j]) + " points excluded at lambda " +
                             fmt(lambdas[j]));
  finalize(rep, opt);
  return rep;
}

Comparison compare_values(Complex estimate, Complex predicted, double tol) {
  Comparison c;
  c.abs_err = std::abs(estimate - predicted);
  c.rel_err = c.abs_err / std::max(1.0, std::abs(predicted));
  c.pass = c.rel_err <= tol;
  c.extend_lambda = !c.pass;
  return c;
}

Comparison compare_prediction(MeanValueReport& report, const Prediction& pred, double tol) {
  const Comparison c = compare_values(report.extrapolated, pred.total, tol);
  report.predicted = pred.total;
  report.discrepancy = c.abs_err;
  return c;
}

void write_convergence_csv(std::ostream& os, const MeanValueReport& r) {
  os << "# schema_version=1 convergence\n";
  os << "lambda,est_re,est_im\n";
  for (const auto& row : r.rows) os << fmt(row.lambda) << "," << fmt(row.estimate.real()) << "," << fmt(row.estimate.imag()) << "\n";
}

}  // namespace expsum
