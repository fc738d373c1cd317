#include "expsum/gkh_formula.hpp"

#include "expsum/error.hpp"
#include "expsum/parallel.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace expsum {

std::vector<std::int64_t> combinatorial_coefficients_1d(const Polytope& segment) {
  if (segment.n != 1) fail(ErrorCode::DegenerateSegment, "built-in coefficients exist only for n = 1");
  if (segment.vertices.size() != 2 || segment.dim != 1)
    fail(ErrorCode::DegenerateSegment, "Newton polytope is a single point");
  // Fixed by the calibration F = 1 + e, G = 1 whose zero density is 1.
  return {1, -1};
}

std::string describe_witness(const CoordinatedCollection& c) {
  std::ostringstream os;
  os.precision(6);
  for (std::size_t j = 0; j < c.faces.size(); ++j) {
    os << (j ? " | " : "") << "{";
    for (std::size_t i = 0; i < c.faces[j].size(); ++i) os << (i ? "," : "") << c.faces[j][i];
    os << "}";
  }
  os << " under xi=(";
  for (Eigen::Index i = 0; i < c.witness.size(); ++i) os << (i ? "," : "") << c.witness(i);
  os << ")";
  return os.str();
}

Prediction predict_mean(const ExpSystem& S, const ExpSum& G, const std::optional<CoefficientMap>& k) {
  S.validate();
  require_same_lattice(S.components.front(), G);
  const std::size_t n = S.n();

  std::vector<Polytope> polys;
  for (const auto& F : S.components) polys.push_back(newton_polytope(F));
  const DevelopedCheck dev = is_developed(polys);
  if (!dev.developed)
    fail(ErrorCode::NotDeveloped, "Newton polytopes are not developed: " + describe_witness(*dev.witness));

  const MinkowskiDecomposition D = minkowski_sum(polys);
  const Polytope& total = D.total;

  std::vector<std::int64_t> weights(total.vertices.size());
  if (n == 1) {
    weights = combinatorial_coefficients_1d(total);
  } else {
    if (!k) fail(ErrorCode::MissingCoefficients, "combinatorial coefficients are required for n >= 2");
    for (std::size_t v = 0; v < total.vertices.size(); ++v) {
      auto it = k->find(total.tags[v]);
      if (it == k->end()) {
        std::string key;
        for (std::size_t i = 0; i < total.tags[v].size(); ++i) key += (i ? "," : "") + std::to_string(total.tags[v][i]);
        fail(ErrorCode::MissingCoefficients, "no coefficient for vertex " + key);
      }
      weights[v] = it->second;
    }
  }

  ExpSum F = S.components.front();
  for (std::size_t j = 1; j < n; ++j) F = multiply(F, S.components[j]);
  const ExpSum GJ = multiply(G, jacobian_det(S));

  std::vector<VertexContribution> contrib(total.vertices.size());
  parallel_for(total.vertices.size(), [&](std::size_t v) {
    VertexContribution& c = contrib[v];
    c.vertex = total.tags[v];
    c.frequency = total.vertices[v];
    c.provenance = D.provenance[v];
    c.k = weights[v];
    auto [Ft, d] = normalize_at_vertex(F, c.vertex);
    c.d = d;
    Exponent neg(c.vertex.size());
    for (std::size_t i = 0; i < neg.size(); ++i) neg[i] = -c.vertex[i];
    const ExpSum H = GJ.shifted(neg) * (1.0 / d);
    c.C = vertex_constant_term(Ft, H);
    c.term = static_cast<double>(c.k) * c.C;
  });
  std::sort(contrib.begin(), contrib.end(),
            [](const VertexContribution& a, const VertexContribution& b) { return a.vertex < b.vertex; });

  Prediction p;
  p.n = n;
  p.lattice = S.lattice_ptr();
  Complex sum(0.0);
  for (const auto& c : contrib) sum += c.term;
  p.total = sum / std::pow(-2.0 * std::numbers::pi, static_cast<double>(n));
  p.contributions = std::move(contrib);
  return p;
}

}  // namespace expsum
