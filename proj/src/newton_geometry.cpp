#include "expsum/newton_geometry.hpp"

#include "expsum/error.hpp"
#include "expsum/linear_program.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace expsum {

namespace {

constexpr double kRelTol = 1e-9;

double point_diameter(const std::vector<Eigen::VectorXd>& pts) {
  double d = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) d = std::max(d, (pts[i] - pts[j]).norm());
  return d;
}

std::size_t affine_dimension(const std::vector<Eigen::VectorXd>& pts, double diam) {
  if (pts.size() <= 1) return 0;
  const auto n = pts.front().size();
  Eigen::MatrixXd M(static_cast<Eigen::Index>(pts.size() - 1), n);
  for (std::size_t i = 1; i < pts.size(); ++i) M.row(static_cast<Eigen::Index>(i - 1)) = (pts[i] - pts[0]).transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > kRelTol * diam) ++r;
  return r;
}

// Exact orientation of (b - a) x (c - a) when all three points carry exact tags.
int exact_orientation(const FrequencyLattice& L, const Exponent& a, const Exponent& b, const Exponent& c) {
  const auto pa = L.exact_frequency_of(a), pb = L.exact_frequency_of(b), pc = L.exact_frequency_of(c);
  const ExactValue cross = (pb[0] - pa[0]) * (pc[1] - pa[1]) - (pb[1] - pa[1]) * (pc[0] - pa[0]);
  if (cross.is_zero()) return 0;
  return cross.to_long_double() > 0 ? 1 : -1;
}

struct PointSet {
  std::vector<Eigen::VectorXd> pts;
  std::vector<Exponent> tags;
  LatticePtr lattice;

  bool exact() const { return lattice && lattice->exact() && !tags.empty(); }
};

int orientation(const PointSet& S, std::size_t a, std::size_t b, std::size_t c, double diam) {
  const Eigen::Vector2d u = S.pts[b].head<2>() - S.pts[a].head<2>();
  const Eigen::Vector2d v = S.pts[c].head<2>() - S.pts[a].head<2>();
  const double cross = u(0) * v(1) - u(1) * v(0);
  if (std::abs(cross) > kRelTol * diam * diam) return cross > 0 ? 1 : -1;
  if (S.exact()) return exact_orientation(*S.lattice, S.tags[a], S.tags[b], S.tags[c]);
  return 0;
}

std::vector<std::size_t> hull_2d(const PointSet& S, double diam) {
  std::vector<std::size_t> idx(S.pts.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (S.pts[a](0) != S.pts[b](0)) return S.pts[a](0) < S.pts[b](0);
    return S.pts[a](1) < S.pts[b](1);
  });
  if (idx.size() <= 2) return idx;
  std::vector<std::size_t> h(2 * idx.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    while (k >= 2 && orientation(S, h[k - 2], h[k - 1], idx[i], diam) <= 0) --k;
    h[k++] = idx[i];
  }
  for (std::size_t i = idx.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && orientation(S, h[k - 2], h[k - 1], idx[i], diam) <= 0) --k;
    h[k++] = idx[i];
  }
  h.resize(k - 1);
  return h;
}

bool lp_is_vertex(const std::vector<Eigen::VectorXd>& pts, std::size_t i, double diam) {
  if (pts.size() == 1) return true;
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(pts.size() - 1), pts[i].size());
  Eigen::Index r = 0;
  for (std::size_t j = 0; j < pts.size(); ++j)
    if (j != i) rows.row(r++) = (pts[i] - pts[j]).transpose();
  return max_min_functional(rows).delta > kRelTol * diam;
}

void order_vertices(Polytope& P) {
  std::vector<std::size_t> idx(P.vertices.size());
  std::iota(idx.begin(), idx.end(), 0);
  if (P.n == 2 && P.vertices.size() > 2) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(2);
    for (const auto& v : P.vertices) c += v;
    c /= static_cast<double>(P.vertices.size());
    std::vector<double> ang(P.vertices.size());
    for (std::size_t i = 0; i < ang.size(); ++i) ang[i] = std::atan2(P.vertices[i](1) - c(1), P.vertices[i](0) - c(0));
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return ang[a] < ang[b]; });
  } else {
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return std::lexicographical_compare(P.vertices[a].data(), P.vertices[a].data() + P.n, P.vertices[b].data(),
                                          P.vertices[b].data() + P.n);
    });
  }
  std::vector<Eigen::VectorXd> v;
  std::vector<Exponent> t;
  for (auto i : idx) {
    v.push_back(P.vertices[i]);
    if (P.tagged()) t.push_back(P.tags[i]);
  }
  P.vertices = std::move(v);
  P.tags = std::move(t);
}

}  // namespace

double Polytope::diameter() const { return point_diameter(vertices); }

Polytope convex_hull(const std::vector<Eigen::VectorXd>& points, const std::vector<Exponent>& tags,
                     LatticePtr lattice) {
  if (points.empty()) fail(ErrorCode::InvalidArgument, "convex hull of an empty set");
  if (!tags.empty() && tags.size() != points.size()) fail(ErrorCode::InvalidArgument, "one tag per point required");
  PointSet S;
  S.lattice = std::move(lattice);
  const auto n = static_cast<std::size_t>(points.front().size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (static_cast<std::size_t>(points[i].size()) != n) fail(ErrorCode::InvalidArgument, "mixed point dimensions");
    bool dup = false;
    for (std::size_t j = 0; j < S.pts.size() && !dup; ++j)
      dup = tags.empty() ? (S.pts[j] == points[i]) : (S.tags[j] == tags[i]);
    if (dup) continue;
    S.pts.push_back(points[i]);
    if (!tags.empty()) S.tags.push_back(tags[i]);
  }
  const double diam = point_diameter(S.pts);

  std::vector<std::size_t> keep;
  if (S.pts.size() == 1) {
    keep = {0};
  } else if (n == 1) {
    auto less = [&](std::size_t a, std::size_t b) {
      if (S.exact()) {
        const ExactValue d = S.lattice->exact_frequency_of(S.tags[a])[0] - S.lattice->exact_frequency_of(S.tags[b])[0];
        return !d.is_zero() && d.to_long_double() < 0;
      }
      return S.pts[a](0) < S.pts[b](0);
    };
    std::vector<std::size_t> idx(S.pts.size());
    std::iota(idx.begin(), idx.end(), 0);
    const auto lo = *std::min_element(idx.begin(), idx.end(), less);
    const auto hi = *std::max_element(idx.begin(), idx.end(), less);
    keep = lo == hi ? std::vector<std::size_t>{lo} : std::vector<std::size_t>{lo, hi};
  } else if (n == 2) {
    keep = hull_2d(S, diam);
  } else {
    for (std::size_t i = 0; i < S.pts.size(); ++i)
      if (lp_is_vertex(S.pts, i, diam)) keep.push_back(i);
  }

  Polytope P;
  P.n = n;
  P.lattice = S.lattice;
  for (auto i : keep) {
    P.vertices.push_back(S.pts[i]);
    if (!S.tags.empty()) P.tags.push_back(S.tags[i]);
  }
  P.dim = affine_dimension(P.vertices, diam);
  order_vertices(P);
  return P;
}

Polytope newton_polytope(const ExpSum& F) {
  if (F.is_zero()) fail(ErrorCode::InvalidArgument, "Newton polytope of the zero sum");
  std::vector<Eigen::VectorXd> pts;
  std::vector<Exponent> tags;
  for (const auto& [m, c] : F.terms()) {
    pts.push_back(F.frequency(m));
    tags.push_back(m);
  }
  return convex_hull(pts, tags, F.lattice_ptr());
}

MinkowskiDecomposition minkowski_sum(const std::vector<Polytope>& polys) {
  if (polys.empty()) fail(ErrorCode::InvalidArgument, "empty Minkowski sum");
  const std::size_t n = polys.front().n;
  bool tagged = true;
  for (const auto& P : polys) {
    if (P.n != n) fail(ErrorCode::InvalidArgument, "Minkowski summands live in different dimensions");
    tagged = tagged && P.tagged() && P.lattice;
  }

  double diam = 0.0;
  for (const auto& P : polys) diam += P.diameter();

  // A tuple of summand vertices sums to a vertex iff one functional strictly
  // prefers every chosen vertex within its own summand.
  std::size_t rows = 0;
  for (const auto& P : polys) rows += P.vertices.size() - 1;

  MinkowskiDecomposition out;
  std::vector<Eigen::VectorXd> pts;
  std::vector<Exponent> tags;
  std::vector<std::size_t> choice(polys.size(), 0);
  for (;;) {
    bool vertex = true;
    if (rows > 0) {
      Eigen::MatrixXd M(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(n));
      Eigen::Index r = 0;
      for (std::size_t j = 0; j < polys.size(); ++j)
        for (std::size_t w = 0; w < polys[j].vertices.size(); ++w)
          if (w != choice[j]) M.row(r++) = (polys[j].vertices[choice[j]] - polys[j].vertices[w]).transpose();
      vertex = max_min_functional(M).delta > kRelTol * std::max(diam, 1e-300);
    }
    if (vertex) {
      Eigen::VectorXd p = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
      Exponent t;
      for (std::size_t j = 0; j < polys.size(); ++j) {
        p += polys[j].vertices[choice[j]];
        if (tagged) {
          const Exponent& e = polys[j].tags[choice[j]];
          if (t.empty()) t.assign(e.size(), 0);
          for (std::size_t i = 0; i < e.size(); ++i) t[i] += e[i];
        }
      }
      pts.push_back(p);
      if (tagged) tags.push_back(t);
      out.provenance.push_back(choice);
    }
    std::size_t j = 0;
    while (j < polys.size() && ++choice[j] == polys[j].vertices.size()) choice[j++] = 0;
    if (j == polys.size()) break;
  }

  Polytope& T = out.total;
  T.n = n;
  T.lattice = tagged ? polys.front().lattice : nullptr;
  T.vertices = pts;
  if (tagged) T.tags = tags;
  T.dim = affine_dimension(pts, point_diameter(pts));

  // Put vertices (and provenance) into the canonical order.
  std::vector<std::size_t> idx(pts.size());
  std::iota(idx.begin(), idx.end(), 0);
  Polytope ordered = T;
  order_vertices(ordered);
  std::vector<std::vector<std::size_t>> prov(pts.size());
  for (std::size_t i = 0; i < ordered.vertices.size(); ++i)
    for (std::size_t k = 0; k < pts.size(); ++k)
      if (pts[k] == ordered.vertices[i] && (!tagged || tags[k] == ordered.tags[i])) prov[i] = out.provenance[k];
  out.total = std::move(ordered);
  out.provenance = std::move(prov);
  return out;
}

std::vector<std::size_t> maximizing_face(const Polytope& P, const Eigen::VectorXd& xi) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& v : P.vertices) best = std::max(best, xi.dot(v));
  const double tol = kRelTol * std::max(1.0, P.diameter()) * std::max(1.0, xi.norm());
  std::vector<std::size_t> face;
  for (std::size_t i = 0; i < P.vertices.size(); ++i)
    if (xi.dot(P.vertices[i]) >= best - tol) face.push_back(i);
  return face;
}

namespace {

using Pair = std::pair<std::size_t, std::size_t>;

// Vertex pairs spanning an edge (a face that is exactly the segment).
std::vector<Pair> edges_of(const Polytope& P) {
  std::vector<Pair> out;
  const std::size_t k = P.vertices.size();
  const auto n = static_cast<Eigen::Index>(P.n);
  const double diam = P.diameter();
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = a + 1; b < k; ++b) {
      if (k == 2) {
        if (P.n >= 2) out.emplace_back(a, b);
        continue;
      }
      // max delta: xi.(a-b) = 0, xi.(a-w) >= delta.
      Eigen::MatrixXd A(static_cast<Eigen::Index>(k), n + 1);
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k));
      Eigen::Index r = 0;
      const Eigen::VectorXd ab = P.vertices[a] - P.vertices[b];
      A.row(r) << ab.transpose(), 0.0;
      ++r;
      A.row(r) << -ab.transpose(), 0.0;
      ++r;
      for (std::size_t w = 0; w < k; ++w) {
        if (w == a || w == b) continue;
        A.row(r) << -(P.vertices[a] - P.vertices[w]).transpose(), 1.0;
        ++r;
      }
      Eigen::VectorXd c = Eigen::VectorXd::Zero(n + 1);
      c(n) = 1.0;
      Eigen::VectorXd lo = Eigen::VectorXd::Constant(n + 1, -1.0), hi = Eigen::VectorXd::Constant(n + 1, 1.0);
      lo(n) = -2.0 * (diam + 1.0);
      hi(n) = 2.0 * (diam + 1.0);
      const LpResult res = solve_bounded_lp(A, rhs, c, lo, hi);
      if (res.status == LpStatus::Optimal && res.value > kRelTol * diam) out.emplace_back(a, b);
    }
  return out;
}

}  // namespace

DevelopedCheck is_developed(const std::vector<Polytope>& polys) {
  if (polys.empty()) fail(ErrorCode::InvalidArgument, "no polytopes");
  const std::size_t n = polys.front().n;
  if (polys.size() != n)
    fail(ErrorCode::InvalidArgument, std::to_string(polys.size()) + " polytopes given in R^" + std::to_string(n));
  for (std::size_t j = 0; j < polys.size(); ++j) {
    if (polys[j].n != n) fail(ErrorCode::InvalidArgument, "polytopes live in different dimensions");
    if (polys[j].is_point()) fail(ErrorCode::DegenerateInput, "polytope " + std::to_string(j + 1) + " is a point");
  }

  // Not developed iff some nonzero xi has a face of positive dimension on
  // every polytope, i.e. simultaneously maximizes an edge of each.
  std::vector<std::vector<Pair>> edges;
  for (const auto& P : polys) {
    edges.push_back(edges_of(P));
    if (edges.back().empty()) return {};
  }

  // All witnesses are collected; the reported one maximizes sum(xi) under
  // |xi|_inf = 1 (lexicographic tie-break) so the choice is canonical.
  std::optional<CoordinatedCollection> best;
  auto better = [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    const double sa = a.sum(), sb = b.sum();
    if (std::abs(sa - sb) > 1e-9) return sa > sb;
    for (Eigen::Index i = 0; i < a.size(); ++i)
      if (std::abs(a(i) - b(i)) > 1e-9) return a(i) > b(i);
    return false;
  };
  const auto ni = static_cast<Eigen::Index>(n);
  std::vector<std::size_t> pick(n, 0);
  for (;;) {
    std::vector<Eigen::VectorXd> rows;
    for (std::size_t j = 0; j < n; ++j) {
      const auto& P = polys[j];
      const auto [a, b] = edges[j][pick[j]];
      const double scale = std::max(1.0, P.diameter());
      rows.push_back((P.vertices[a] - P.vertices[b]) / scale);
      rows.push_back((P.vertices[b] - P.vertices[a]) / scale);
      for (std::size_t w = 0; w < P.vertices.size(); ++w)
        if (w != a && w != b) rows.push_back((P.vertices[w] - P.vertices[a]) / scale);
    }
    Eigen::MatrixXd A(static_cast<Eigen::Index>(rows.size()), ni);
    for (std::size_t r = 0; r < rows.size(); ++r) A.row(static_cast<Eigen::Index>(r)) = rows[r].transpose();
    Eigen::VectorXd rhs = Eigen::VectorXd::Constant(A.rows(), 0.0);
    const Eigen::VectorXd lo = Eigen::VectorXd::Constant(ni, -1.0), hi = Eigen::VectorXd::Constant(ni, 1.0);
    for (Eigen::Index i = 0; i < ni; ++i)
      for (double sign : {1.0, -1.0}) {
        Eigen::VectorXd c = Eigen::VectorXd::Zero(ni);
        c(i) = sign;
        const LpResult res = solve_bounded_lp(A, rhs, c, lo, hi);
        if (res.status != LpStatus::Optimal || res.value <= 1e-7) continue;
        CoordinatedCollection cc;
        cc.witness = res.x / res.x.cwiseAbs().maxCoeff();
        bool ok = true;
        for (const auto& P : polys) {
          cc.faces.push_back(maximizing_face(P, cc.witness));
          ok = ok && cc.faces.back().size() >= 2;
        }
        if (!ok) continue;
        if (!best || better(cc.witness, best->witness)) best = std::move(cc);
      }
    std::size_t j = 0;
    while (j < n && ++pick[j] == edges[j].size()) pick[j++] = 0;
    if (j == n) break;
  }
  if (best) return {false, std::move(best)};
  return {};
}

namespace {

double polygon_area(const std::vector<Eigen::Vector2d>& pts) {
  if (pts.size() < 3) return 0.0;
  Eigen::Vector2d c = Eigen::Vector2d::Zero();
  for (const auto& p : pts) c += p;
  c /= static_cast<double>(pts.size());
  std::vector<std::size_t> idx(pts.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return std::atan2(pts[a](1) - c(1), pts[a](0) - c(0)) < std::atan2(pts[b](1) - c(1), pts[b](0) - c(0));
  });
  double area = 0.0;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    const auto& p = pts[idx[i]];
    const auto& q = pts[idx[(i + 1) % idx.size()]];
    area += p(0) * q(1) - p(1) * q(0);
  }
  return 0.5 * std::abs(area);
}

double volume_3d(const std::vector<Eigen::VectorXd>& V) {
  const double diam = point_diameter(V);
  Eigen::Vector3d c = Eigen::Vector3d::Zero();
  for (const auto& v : V) c += v.head<3>();
  c /= static_cast<double>(V.size());
  std::vector<std::pair<Eigen::Vector3d, double>> planes;
  const double tol = kRelTol * diam;
  for (std::size_t i = 0; i < V.size(); ++i)
    for (std::size_t j = i + 1; j < V.size(); ++j)
      for (std::size_t k = j + 1; k < V.size(); ++k) {
        Eigen::Vector3d nrm = (V[j] - V[i]).head<3>().cross((V[k] - V[i]).head<3>());
        if (nrm.norm() <= tol * diam) continue;
        nrm.normalize();
        double off = nrm.dot(V[i].head<3>());
        if (nrm.dot(c) > off) {
          nrm = -nrm;
          off = -off;
        }
        bool supporting = true;
        for (const auto& v : V)
          if (nrm.dot(v.head<3>()) > off + tol) {
            supporting = false;
            break;
          }
        if (!supporting) continue;
        bool seen = false;
        for (const auto& [pn, po] : planes)
          if ((pn - nrm).norm() < 1e-9 && std::abs(po - off) < tol) seen = true;
        if (!seen) planes.emplace_back(nrm, off);
      }
  double vol = 0.0;
  for (const auto& [nrm, off] : planes) {
    Eigen::Vector3d u = nrm.unitOrthogonal();
    Eigen::Vector3d w = nrm.cross(u);
    std::vector<Eigen::Vector2d> face;
    for (const auto& v : V)
      if (std::abs(nrm.dot(v.head<3>()) - off) <= tol) face.emplace_back(u.dot(v.head<3>()), w.dot(v.head<3>()));
    vol += polygon_area(face) * (off - nrm.dot(c)) / 3.0;
  }
  return vol;
}

}  // namespace

double volume(const Polytope& P) {
  if (P.n > 3) fail(ErrorCode::DimensionUnsupported, "volume is implemented for n <= 3");
  if (P.dim < P.n || P.n == 0) return 0.0;
  if (P.n == 1) return std::abs(P.vertices.back()(0) - P.vertices.front()(0));
  if (P.n == 2) {
    std::vector<Eigen::Vector2d> pts;
    for (const auto& v : P.vertices) pts.emplace_back(v(0), v(1));
    return polygon_area(pts);
  }
  return volume_3d(P.vertices);
}

double mixed_volume(const std::vector<Polytope>& polys) {
  if (polys.empty()) fail(ErrorCode::InvalidArgument, "no polytopes");
  const std::size_t n = polys.front().n;
  if (n > 3) fail(ErrorCode::DimensionUnsupported, "mixed volume is implemented for n <= 3");
  if (polys.size() != n)
    fail(ErrorCode::InvalidArgument, std::to_string(polys.size()) + " polytopes given in R^" + std::to_string(n));
  double acc = 0.0;
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    std::vector<Polytope> sub;
    for (std::size_t j = 0; j < n; ++j)
      if (mask & (1u << j)) sub.push_back(polys[j]);
    const double v = volume(minkowski_sum(sub).total);
    const int sign = ((n - sub.size()) % 2 == 0) ? 1 : -1;
    acc += sign * v;
  }
  double fact = 1.0;
  for (std::size_t k = 2; k <= n; ++k) fact *= static_cast<double>(k);
  return acc / fact;
}

}  // namespace expsum
