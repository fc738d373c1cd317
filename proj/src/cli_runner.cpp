#include "expsum/cli_runner.hpp"

#include "expsum/error.hpp"
#include "expsum/gkh_formula.hpp"
#include "expsum/mean_value.hpp"
#include "expsum/newton_geometry.hpp"
#include "expsum/parallel.hpp"
#include "expsum/torus_lab.hpp"
#include "expsum/zero_finder.hpp"
#include "format.hpp"

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace expsum {

namespace {

using json = nlohmann::ordered_json;
constexpr int kSchemaVersion = 1;

[[noreturn]] void schema(const std::string& path, const std::string& what) { fail(ErrorCode::SchemaError, path + ": " + what); }

const json* find(const json& j, const char* key) {
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) schema(path, "expected a number");
  return j.get<double>();
}

double positive(const json& j, const std::string& path) {
  const double v = number(j, path);
  if (!(v > 0) || !std::isfinite(v)) schema(path, "must be positive");
  return v;
}

std::string expr(const json& j, const std::string& path) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<std::int64_t>());
  schema(path, "frequency entries are expression strings such as \"1+sqrt(2)\"");
}

std::vector<std::string> freq(const json& j, std::size_t n, const std::string& path) {
  std::vector<std::string> out;
  if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(expr(j[i], path + "[" + std::to_string(i) + "]"));
  } else {
    out.push_back(expr(j, path));
  }
  if (out.size() != n) schema(path, "expected " + std::to_string(n) + " coordinates");
  return out;
}

Complex coef(const json& j, const std::string& path) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2) return {number(j[0], path + "[0]"), number(j[1], path + "[1]")};
  if (j.is_object()) {
    const json* re = find(j, "re");
    const json* im = find(j, "im");
    return {re ? number(*re, path + ".re") : 0.0, im ? number(*im, path + ".im") : 0.0};
  }
  schema(path, "coefficient must be a number, [re, im] or {re, im}");
}

std::vector<TermSpec> terms(const json& j, std::size_t n, const std::string& path) {
  if (!j.is_array() || j.empty()) schema(path, "expected a nonempty list of terms");
  std::vector<TermSpec> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    const json* c = find(j[i], "coef");
    const json* f = find(j[i], "freq");
    if (!c || !f) schema(p, "term needs coef and freq");
    out.push_back({coef(*c, p + ".coef"), freq(*f, n, p + ".freq")});
  }
  return out;
}

std::vector<TrigTermSpec> trig_terms(const json& j, std::size_t n, const std::string& path) {
  if (!j.is_array()) schema(path, "expected a list of trigonometric terms");
  std::vector<TrigTermSpec> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    const json* f = find(j[i], "freq");
    if (!f) schema(p, "term needs freq");
    TrigTermSpec t;
    t.freq = freq(*f, n, p + ".freq");
    if (const json* c = find(j[i], "c")) t.c = number(*c, p + ".c");
    if (const json* d = find(j[i], "d")) t.d = number(*d, p + ".d");
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<TorusTermSpec> torus_terms(const json& j, const std::string& path) {
  if (!j.is_array()) schema(path, "expected a list of torus terms");
  std::vector<TorusTermSpec> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    const json* k = find(j[i], "k");
    if (!k || !k->is_array()) schema(p, "torus term needs an integer vector k");
    TorusTermSpec t;
    for (const auto& v : *k) {
      if (!v.is_number_integer()) schema(p + ".k", "entries must be integers");
      t.k.push_back(v.get<std::int64_t>());
    }
    if (const json* c = find(j[i], "c")) t.c = number(*c, p + ".c");
    if (const json* d = find(j[i], "d")) t.d = number(*d, p + ".d");
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<std::vector<std::string>> generators(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) schema(path, "expected a nonempty list of frequencies");
  std::vector<std::vector<std::string>> out;
  std::size_t n = j[0].is_array() ? j[0].size() : 1;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(freq(j[i], n, path + "[" + std::to_string(i) + "]"));
  return out;
}

WindowSpec window(const json* j, std::size_t n) {
  WindowSpec W;
  W.center.assign(n, 0.5);
  W.half.assign(n, 0.5);
  if (!j) return W;
  if (!j->is_object()) schema("window", "expected an object");
  if (const json* s = find(*j, "shape")) {
    if (*s == "box") W.shape = WindowShape::Box;
    else if (*s == "ball") W.shape = WindowShape::Ball;
    else schema("window.shape", "must be \"box\" or \"ball\"");
  }
  auto vec = [&](const json& v, const std::string& path) {
    std::vector<double> out;
    if (!v.is_array() || v.size() != n) schema(path, "expected " + std::to_string(n) + " numbers");
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], path + "[" + std::to_string(i) + "]"));
    return out;
  };
  if (const json* c = find(*j, "center")) W.center = vec(*c, "window.center");
  if (const json* h = find(*j, "half")) W.half = vec(*h, "window.half");
  if (const json* r = find(*j, "radius")) W.half.assign(n, positive(*r, "window.radius"));
  if (const json* l = find(*j, "lambda0")) W.lambda0 = positive(*l, "window.lambda0");
  if (const json* r = find(*j, "ratio")) W.ratio = number(*r, "window.ratio");
  if (const json* J = find(*j, "J")) {
    if (!J->is_number_unsigned()) schema("window.J", "must be a nonnegative integer");
    W.J = J->get<std::size_t>();
  }
  try {
    W.validate();
  } catch (const Error& e) {
    schema("window", e.what());
  }
  return W;
}

void set_field(RunConfig& cfg, json& doc, const std::string& field, const std::string& value) {
  auto as_double = [&] {
    try {
      std::size_t used = 0;
      const double v = std::stod(value, &used);
      if (used != value.size() || !(v > 0)) throw std::invalid_argument(value);
      return v;
    } catch (const std::exception&) {
      schema(field, "expected a positive number, got \"" + value + "\"");
    }
  };
  auto as_unsigned = [&] {
    try {
      std::size_t used = 0;
      const unsigned long long v = std::stoull(value, &used);
      if (used != value.size() || value.front() == '-') throw std::invalid_argument(value);
      return v;
    } catch (const std::exception&) {
      schema(field, "expected a nonnegative integer, got \"" + value + "\"");
    }
  };
  if (field == "command") {
    cfg.command = value;
    doc["command"] = value;
  } else if (field == "seed") {
    cfg.seed = as_unsigned();
    doc["seed"] = cfg.seed;
  } else if (field == "threads") {
    cfg.threads = as_unsigned();
    doc["threads"] = cfg.threads;
  } else if (field == "tol_residual") {
    cfg.tol_residual = as_double();
    doc["tolerances"]["residual"] = cfg.tol_residual;
  } else if (field == "tol_compare") {
    cfg.tol_compare = as_double();
    doc["tolerances"]["compare"] = cfg.tol_compare;
  } else if (field == "out_dir") {
    cfg.out_dir = value;
    doc["out_dir"] = value;
  } else if (field == "k_file") {
    cfg.k_file = value;
    doc["k_file"] = value;
  } else {
    fail(ErrorCode::InvalidArgument, "unknown override field " + field);
  }
}

const std::vector<std::string> kCommands = {"lattice", "geometry", "predict", "zeros", "mean", "weyl", "transversal", "verify"};

// Pretty printer matching json::dump(2) except that floating-point numbers use
// 17 significant digits, so artifacts are stable at a fixed precision.
void dump17(std::string& out, const json& j, int depth) {
  const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' '), close(static_cast<std::size_t>(2 * depth), ' ');
  if (j.is_object() && !j.empty()) {
    out += "{\n";
    std::size_t i = 0;
    for (auto it = j.begin(); it != j.end(); ++it, ++i) {
      out += pad + json(it.key()).dump() + ": ";
      dump17(out, it.value(), depth + 1);
      out += i + 1 < j.size() ? ",\n" : "\n";
    }
    out += close + "}";
  } else if (j.is_array() && !j.empty()) {
    out += "[\n";
    for (std::size_t i = 0; i < j.size(); ++i) {
      out += pad;
      dump17(out, j[i], depth + 1);
      out += i + 1 < j.size() ? ",\n" : "\n";
    }
    out += close + "]";
  } else if (j.is_number_float()) {
    const double v = j.get<double>();
    out += std::isfinite(v) ? fmt(v) : "null";
  } else {
    out += j.dump();
  }
}

std::string dump17(const json& j) {
  std::string out;
  dump17(out, j, 0);
  return out;
}

// ---------------------------------------------------------------- run context

struct Context {
  const RunConfig& cfg;
  std::filesystem::path dir;
  std::vector<std::string> files;
  std::ostringstream log;
  json summary = json::object();

  LatticePtr lattice;
  std::vector<ExpSum> components;
  std::optional<ExpSum> G;

  void write(const std::string& name, const std::string& text) {
    std::ofstream os(dir / name, std::ios::binary);
    os << text;
    if (!os) fail(ErrorCode::IOError, "cannot write " + (dir / name).string());
    files.push_back(name);
  }
  void write_json(const std::string& name, const json& j) { write(name, dump17(j) + "\n"); }
};

// Drops the sign of negative zero so artifacts do not print -0.0.
double clean(double v) { return v == 0.0 ? 0.0 : v; }

json complex_json(Complex c) { return json::array({clean(c.real()), clean(c.imag())}); }

json vector_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(clean(v(i)));
  return a;
}

json exponent_json(const Exponent& m) {
  json a = json::array();
  for (auto v : m) a.push_back(v);
  return a;
}

json schedule_json(const WindowSpec& W) {
  json j;
  j["shape"] = W.shape == WindowShape::Box ? "box" : "ball";
  j["center"] = W.center;
  j["half"] = W.half;
  j["lambda0"] = W.lambda0;
  j["ratio"] = W.ratio;
  j["J"] = W.J;
  j["lambdas"] = W.lambdas();
  return j;
}

void build_lattice(Context& cx) {
  const RunConfig& cfg = cx.cfg;
  if (cfg.system.empty()) schema("system", "required for command " + cfg.command);
  std::vector<Frequency> freqs;
  for (const auto& comp : cfg.system)
    for (const auto& t : comp) freqs.push_back(parse_frequency(t.freq));
  for (const auto& t : cfg.G) freqs.push_back(parse_frequency(t.freq));
  cx.lattice = std::make_shared<const FrequencyLattice>(find_basis(freqs, cfg.K, cfg.eps));
  const auto& coords = cx.lattice->input_coords();
  std::size_t idx = 0;
  for (const auto& comp : cfg.system) {
    std::map<Exponent, Complex> m;
    for (const auto& t : comp) m[coords[idx++]] += t.coef;
    cx.components.emplace_back(cx.lattice, m);
  }
  std::map<Exponent, Complex> g;
  if (cfg.G.empty()) g[Exponent(cx.lattice->rank(), 0)] = 1.0;
  for (const auto& t : cfg.G) g[coords[idx++]] += t.coef;
  cx.G = ExpSum(cx.lattice, g);

  const FrequencyLattice& L = *cx.lattice;
  json j;
  j["schema_version"] = kSchemaVersion;
  j["n"] = L.n();
  j["rank"] = L.rank();
  j["exact"] = L.exact();
  j["K"] = L.bound();
  j["eps"] = L.eps();
  json basis = json::array();
  for (std::size_t i = 0; i < L.rank(); ++i)
    basis.push_back({{"expr", L.basis()[i].to_string()}, {"value", vector_json(L.basis_matrix().row(static_cast<Eigen::Index>(i)).transpose())}});
  j["basis"] = basis;
  json inputs = json::array();
  for (std::size_t i = 0; i < L.inputs().size(); ++i)
    inputs.push_back({{"expr", L.inputs()[i].to_string()}, {"coords", exponent_json(L.input_coords()[i])}});
  j["inputs"] = inputs;
  cx.write_json("lattice.json", j);
  cx.summary["rank"] = L.rank();
  cx.log << "lattice: rank " << L.rank() << " basis " << L.describe() << "\n";
}

ExpSystem system_of(const Context& cx) { return ExpSystem{cx.components}; }

json polytope_json(const Polytope& P) {
  json j;
  json verts = json::array(), tags = json::array();
  for (const auto& v : P.vertices) verts.push_back(vector_json(v));
  for (const auto& t : P.tags) tags.push_back(exponent_json(t));
  j["vertices"] = verts;
  if (P.tagged()) j["tags"] = tags;
  j["dim"] = P.dim;
  return j;
}

// Writes geometry.json; returns false (after writing) when the system is not developed.
bool geometry(Context& cx, bool gate) {
  const ExpSystem S = system_of(cx);
  S.validate();
  if (S.n() != cx.cfg.n) schema("system", "expected n = " + std::to_string(cx.cfg.n) + " components");
  std::vector<Polytope> polys;
  for (const auto& F : S.components) polys.push_back(newton_polytope(F));
  json j;
  j["schema_version"] = kSchemaVersion;
  json pj = json::array();
  for (const auto& P : polys) pj.push_back(polytope_json(P));
  j["polytopes"] = pj;
  const auto mk = minkowski_sum(polys);
  json m = polytope_json(mk.total);
  m["provenance"] = mk.provenance;
  j["minkowski_sum"] = m;
  bool point = false;
  for (const auto& P : polys) point = point || P.is_point();
  std::string witness;
  bool developed = false;
  if (!point) {
    const auto check = is_developed(polys);
    developed = check.developed;
    if (!developed) {
      witness = describe_witness(*check.witness);
      j["witness"] = {{"faces", check.witness->faces}, {"xi", vector_json(check.witness->witness)}, {"description", witness}};
    }
  } else {
    witness = "a component has a single term";
  }
  j["developed"] = developed;
  if (S.n() <= 3) {
    const double mv = mixed_volume(polys);
    double fact = 1.0;
    for (std::size_t k = 2; k <= S.n(); ++k) fact *= static_cast<double>(k);
    j["mixed_volume"] = mv;
    j["zero_density"] = fact * mv;
    cx.summary["zero_density"] = fact * mv;
  }
  cx.write_json("geometry.json", j);
  cx.summary["developed"] = developed;
  cx.log << "geometry: developed=" << (developed ? "true" : "false") << (witness.empty() ? "" : " (" + witness + ")") << "\n";
  if (gate && !developed) fail(ErrorCode::NotDeveloped, "system is not developed: " + witness);
  return developed;
}

std::optional<CoefficientMap> load_k(const Context& cx) {
  if (cx.cfg.k_file.empty()) return std::nullopt;
  std::ifstream is(cx.cfg.k_file);
  if (!is) fail(ErrorCode::IOError, "cannot read k-file " + cx.cfg.k_file);
  json j;
  try {
    j = json::parse(is);
  } catch (const json::exception& e) {
    schema("k_file", e.what());
  }
  const json* k = find(j, "k");
  if (!k || !k->is_object()) schema("k_file.k", "expected an object mapping \"m1,m2,...\" to integers");
  CoefficientMap out;
  for (auto it = k->begin(); it != k->end(); ++it) {
    Exponent m;
    std::stringstream ss(it.key());
    std::string part;
    while (std::getline(ss, part, ',')) {
      try {
        std::size_t used = 0;
        m.push_back(std::stoll(part, &used));
        if (used != part.size()) throw std::invalid_argument(part);
      } catch (const std::exception&) {
        schema("k_file.k", "bad vertex key \"" + it.key() + "\"");
      }
    }
    if (!it.value().is_number_integer()) schema("k_file.k." + it.key(), "expected an integer");
    out[m] = it.value().get<std::int64_t>();
  }
  return out;
}

Prediction predict(Context& cx) {
  const Prediction p = predict_mean(system_of(cx), *cx.G, load_k(cx));
  json j;
  j["schema_version"] = kSchemaVersion;
  j["n"] = p.n;
  j["total"] = complex_json(p.total);
  json cs = json::array();
  for (const auto& c : p.contributions)
    cs.push_back({{"vertex", exponent_json(c.vertex)},
                  {"frequency", vector_json(c.frequency)},
                  {"provenance", c.provenance},
                  {"d", complex_json(c.d)},
                  {"C", complex_json(c.C)},
                  {"k", c.k},
                  {"term", complex_json(c.term)}});
  j["contributions"] = cs;
  cx.write_json("prediction.json", j);
  cx.summary["predicted"] = complex_json(p.total);
  cx.log << "predict: " << fmt(p.total.real()) << " " << fmt(p.total.imag()) << "i\n";
  return p;
}

ZeroFinderOptions zero_options(const RunConfig& cfg) {
  ZeroFinderOptions o;
  o.tau_res = cfg.tol_residual;
  o.tau_sep = cfg.tol_separation;
  o.tau_bdry = cfg.tol_boundary;
  o.seed = cfg.seed;
  return o;
}

void zeros(Context& cx) {
  const ExpSystem S = system_of(cx);
  const auto opt = zero_options(cx.cfg);
  const auto strip = strip_radius(S, opt);
  std::vector<std::pair<double, double>> win;
  if (cx.cfg.zero_window) {
    win = *cx.cfg.zero_window;
  } else {
    win = cx.cfg.window.at(cx.cfg.window.lambdas().back()).bounding_box();
  }
  if (win.size() != S.n()) schema("zeros.window", "expected one [lo, hi] pair per variable");
  const auto r = locate_zeros(S, StripBox{strip.R, win}, opt);
  std::ostringstream os;
  write_zeros_csv(os, r.zeros, S.n());
  cx.write("zeros.csv", os.str());
  cx.summary["zeros"] = r.zeros.size();
  cx.summary["strip_R"] = strip.R;
  cx.summary["warnings"] = r.warnings;
  cx.log << "zeros: R=" << fmt(strip.R) << " (certified " << fmt(strip.bound) << ", " << strip.doublings
         << " doublings) found " << r.zeros.size() << " expected " << fmt(r.expected) << "\n";
  for (const auto& s : r.nudges) cx.log << "nudge: " << s << "\n";
  for (const auto& w : r.warnings) cx.log << "warning: " << w << "\n";
}

json report_json(const Context& cx, const MeanValueReport& r, const std::string& system, const std::string& G) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["system"] = system;
  j["G"] = G;
  j["lattice"] = cx.lattice ? json(cx.lattice->describe()) : json(nullptr);
  j["schedule"] = schedule_json(cx.cfg.window);
  json rows = json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"lambda", row.lambda},
                    {"sum_re", row.sum.real()},
                    {"sum_im", row.sum.imag()},
                    {"vol", row.volume},
                    {"est_re", row.estimate.real()},
                    {"est_im", row.estimate.imag()},
                    {"points", row.points}});
  j["per_lambda"] = rows;
  j["extrapolated"] = complex_json(r.extrapolated);
  j["predicted"] = r.predicted ? complex_json(*r.predicted) : json(nullptr);
  j["discrepancy"] = r.discrepancy ? json(*r.discrepancy) : json(nullptr);
  j["diagnostic"] = r.diagnostic;
  j["nonconvergent"] = r.nonconvergent;
  j["warnings"] = r.warnings;
  j["seed"] = r.seed;
  if (r.strip_R > 0) j["strip_R"] = r.strip_R;
  return j;
}

MeanValueOptions mean_options(const RunConfig& cfg) {
  MeanValueOptions o;
  o.zeros = zero_options(cfg);
  o.isolation.tau_res = cfg.tol_residual;
  o.convergence_tol = cfg.tol_convergence;
  return o;
}

TrigPoly trig_of(const std::vector<TrigTermSpec>& ts, std::size_t n) {
  std::vector<TrigTerm> out;
  for (const auto& t : ts) out.push_back({parse_frequency(t.freq), t.c, t.d});
  return TrigPoly(n, std::move(out));
}

std::string system_string(const Context& cx) {
  std::string s;
  for (std::size_t j = 0; j < cx.components.size(); ++j) s += (j ? "; " : "") + cx.components[j].to_string();
  return s;
}

MeanValueReport mean(Context& cx, const std::optional<Prediction>& pred) {
  const RunConfig& cfg = cx.cfg;
  MeanValueReport r;
  std::string sys, g;
  if (cfg.has_real) {
    SemiTrigSet V{cfg.n, {}};
    for (const auto& cl : cfg.real_clauses) {
      SemiTrigClause c;
      for (const auto& e : cl.equalities) c.equalities.push_back(trig_of(e, cfg.n));
      for (const auto& p : cl.positives) c.positives.push_back(trig_of(p, cfg.n));
      V.clauses.push_back(std::move(c));
    }
    const TrigPoly T = trig_of(cfg.real_weight, cfg.n);
    r = estimate_mean_real(V, T, cfg.window, mean_options(cfg));
    r.seed = cfg.seed;
    sys = "real semitrigonometric set with " + std::to_string(V.clauses.size()) + " clauses";
    g = "T";
  } else {
    r = estimate_mean(system_of(cx), *cx.G, cfg.window, mean_options(cfg));
    sys = system_string(cx);
    g = cx.G->to_string();
  }
  if (pred) compare_prediction(r, *pred, cfg.tol_compare);
  if (!cfg.has_real) {
    std::ostringstream zs;
    write_zeros_csv(zs, r.zeros, cfg.n);
    cx.write("zeros.csv", zs.str());
    cx.log << "zeros: R=" << fmt(r.strip_R) << " found " << r.zeros.size() << " in the union of the windows\n";
  }
  cx.write_json("mean_value.json", report_json(cx, r, sys, g));
  std::ostringstream os;
  write_convergence_csv(os, r);
  cx.write("convergence.csv", os.str());
  cx.summary["estimate"] = complex_json(r.extrapolated);
  cx.summary["diagnostic"] = r.diagnostic;
  cx.log << "mean: extrapolated " << fmt(r.extrapolated.real()) << " " << fmt(r.extrapolated.imag()) << "i diagnostic "
         << fmt(r.diagnostic) << "\n";
  for (const auto& w : r.warnings) cx.log << "warning: " << w << "\n";
  return r;
}

LatticePtr torus_lattice(const RunConfig& cfg, const char* section) {
  if (cfg.torus_generators.empty()) schema(std::string(section) + ".frequencies", "required for command " + cfg.command);
  std::vector<Frequency> fs;
  for (const auto& g : cfg.torus_generators) fs.push_back(parse_frequency(g));
  return std::make_shared<const FrequencyLattice>(find_basis(fs, cfg.K, cfg.eps));
}

TorusTrig torus_of(const std::vector<TorusTermSpec>& ts, std::size_t dim) {
  std::vector<TorusTerm> out;
  for (const auto& t : ts) out.push_back({t.k, t.c, t.d});
  return TorusTrig(dim, std::move(out));
}

void weyl(Context& cx) {
  const auto L = torus_lattice(cx.cfg, "weyl");
  const auto lift = build_lift(*L, LiftMode::Real, 0.0, cx.cfg.K);
  const auto rows = orbit_average(torus_of(cx.cfg.weyl_f, lift.torus_dim), lift, cx.cfg.window);
  std::ostringstream os;
  write_weyl_csv(os, rows);
  cx.write("weyl.csv", os.str());
  cx.summary["torus_dim"] = lift.torus_dim;
  cx.summary["abs_err"] = rows.back().abs_err;
  cx.log << "weyl: torus dimension " << lift.torus_dim << ", final abs_err " << fmt(rows.back().abs_err) << "\n";
}

void transversal(Context& cx) {
  const auto L = torus_lattice(cx.cfg, "transversal");
  const auto lift = build_lift(*L, LiftMode::Real, 0.0, cx.cfg.K);
  TorusSet V{lift.torus_dim, {}, {}};
  for (const auto& e : cx.cfg.torus_equalities) V.equalities.push_back(torus_of(e, lift.torus_dim));
  for (const auto& p : cx.cfg.torus_positives) V.positives.push_back(torus_of(p, lift.torus_dim));
  const auto weight = cx.cfg.torus_weight.empty() ? TorusTrig(lift.torus_dim, {{Exponent(lift.torus_dim, 0), 1.0, 0.0}})
                                                  : torus_of(cx.cfg.torus_weight, lift.torus_dim);
  const auto r = transversal_volume_curve(V, weight, lift);
  json j;
  j["schema_version"] = kSchemaVersion;
  j["lattice"] = L->describe();
  j["value"] = r.value;
  j["length"] = r.length;
  j["components"] = r.components;
  j["excluded_samples"] = r.excluded;
  cx.write_json("transversal.json", j);
  std::ostringstream os;
  write_curve_csv(os, r);
  cx.write("curve.csv", os.str());
  cx.summary["value"] = r.value;
  cx.log << "transversal: value " << fmt(r.value) << " over " << r.components << " components\n";
}

}  // namespace

RunConfig parse_run_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::SchemaError, std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) schema("config", "expected a JSON object");
  RunConfig cfg;
  if (const json* v = find(j, "schema_version")) {
    if (!v->is_number_integer() || v->get<int>() != kSchemaVersion) schema("schema_version", "unsupported version");
  } else {
    json versioned = {{"schema_version", kSchemaVersion}};
    versioned.update(j);
    j = std::move(versioned);
  }
  if (const json* c = find(j, "command")) {
    if (!c->is_string()) schema("command", "expected a string");
    cfg.command = c->get<std::string>();
  }
  if (const json* n = find(j, "n")) {
    if (!n->is_number_unsigned() || n->get<std::size_t>() == 0) schema("n", "must be a positive integer");
    cfg.n = n->get<std::size_t>();
  }
  if (const json* s = find(j, "system")) {
    if (!s->is_array()) schema("system", "expected a list of components");
    for (std::size_t i = 0; i < s->size(); ++i) cfg.system.push_back(terms((*s)[i], cfg.n, "system[" + std::to_string(i) + "]"));
    if (cfg.system.size() != cfg.n) schema("system", "expected n = " + std::to_string(cfg.n) + " components");
  }
  if (const json* g = find(j, "G")) cfg.G = terms(*g, cfg.n, "G");
  if (const json* t = find(j, "tolerances")) {
    if (const json* v = find(*t, "residual")) cfg.tol_residual = positive(*v, "tolerances.residual");
    if (const json* v = find(*t, "compare")) cfg.tol_compare = positive(*v, "tolerances.compare");
    if (const json* v = find(*t, "separation")) cfg.tol_separation = positive(*v, "tolerances.separation");
    if (const json* v = find(*t, "boundary")) cfg.tol_boundary = positive(*v, "tolerances.boundary");
    if (const json* v = find(*t, "convergence")) cfg.tol_convergence = positive(*v, "tolerances.convergence");
  }
  if (const json* l = find(j, "lattice")) {
    if (const json* K = find(*l, "K")) {
      if (!K->is_number_integer() || K->get<std::int64_t>() < 1) schema("lattice.K", "must be a positive integer");
      cfg.K = K->get<std::int64_t>();
    }
    if (const json* e = find(*l, "eps")) cfg.eps = positive(*e, "lattice.eps");
  }
  if (const json* s = find(j, "seed")) {
    if (!s->is_number_unsigned()) schema("seed", "must be a nonnegative integer");
    cfg.seed = s->get<std::uint64_t>();
  }
  if (const json* t = find(j, "threads")) {
    if (!t->is_number_unsigned()) schema("threads", "must be a nonnegative integer");
    cfg.threads = t->get<std::size_t>();
  }
  if (const json* k = find(j, "k_file")) {
    if (!k->is_string()) schema("k_file", "expected a path");
    cfg.k_file = k->get<std::string>();
  }
  if (const json* o = find(j, "out_dir")) {
    if (!o->is_string()) schema("out_dir", "expected a path");
    cfg.out_dir = o->get<std::string>();
  }
  if (const json* z = find(j, "zeros")) {
    if (const json* w = find(*z, "window")) {
      if (!w->is_array()) schema("zeros.window", "expected a list of [lo, hi] pairs");
      std::vector<std::pair<double, double>> win;
      for (std::size_t i = 0; i < w->size(); ++i) {
        const std::string p = "zeros.window[" + std::to_string(i) + "]";
        if (!(*w)[i].is_array() || (*w)[i].size() != 2) schema(p, "expected [lo, hi]");
        win.emplace_back(number((*w)[i][0], p + "[0]"), number((*w)[i][1], p + "[1]"));
      }
      cfg.zero_window = win;
    }
  }
  if (const json* w = find(j, "weyl")) {
    if (const json* f = find(*w, "frequencies")) cfg.torus_generators = generators(*f, "weyl.frequencies");
    if (const json* f = find(*w, "f")) cfg.weyl_f = torus_terms(*f, "weyl.f");
  }
  if (const json* t = find(j, "transversal")) {
    if (const json* f = find(*t, "frequencies")) cfg.torus_generators = generators(*f, "transversal.frequencies");
    if (const json* e = find(*t, "equalities"))
      for (std::size_t i = 0; i < e->size(); ++i)
        cfg.torus_equalities.push_back(torus_terms((*e)[i], "transversal.equalities[" + std::to_string(i) + "]"));
    if (const json* p = find(*t, "positives"))
      for (std::size_t i = 0; i < p->size(); ++i)
        cfg.torus_positives.push_back(torus_terms((*p)[i], "transversal.positives[" + std::to_string(i) + "]"));
    if (const json* w = find(*t, "weight")) cfg.torus_weight = torus_terms(*w, "transversal.weight");
  }
  if (const json* r = find(j, "real")) {
    cfg.has_real = true;
    const json* cl = find(*r, "clauses");
    if (!cl || !cl->is_array()) schema("real.clauses", "expected a list of clauses");
    for (std::size_t i = 0; i < cl->size(); ++i) {
      const std::string p = "real.clauses[" + std::to_string(i) + "]";
      ClauseSpec c;
      if (const json* e = find((*cl)[i], "equalities"))
        for (std::size_t k = 0; k < e->size(); ++k)
          c.equalities.push_back(trig_terms((*e)[k], cfg.n, p + ".equalities[" + std::to_string(k) + "]"));
      if (const json* q = find((*cl)[i], "positives"))
        for (std::size_t k = 0; k < q->size(); ++k)
          c.positives.push_back(trig_terms((*q)[k], cfg.n, p + ".positives[" + std::to_string(k) + "]"));
      cfg.real_clauses.push_back(std::move(c));
    }
    if (const json* T = find(*r, "T")) cfg.real_weight = trig_terms(*T, cfg.n, "real.T");
    else cfg.real_weight = {{std::vector<std::string>(cfg.n, "0"), 1.0, 0.0}};
  }
  cfg.window = window(find(j, "window"), cfg.n);
  if (std::find(kCommands.begin(), kCommands.end(), cfg.command) == kCommands.end())
    schema("command", "unknown command \"" + cfg.command + "\"");
  cfg.source = dump17(j);
  return cfg;
}

void apply_override(RunConfig& cfg, const std::string& field, const std::string& value) {
  json doc = json::parse(cfg.source);
  set_field(cfg, doc, field, value);
  if (field == "command" && std::find(kCommands.begin(), kCommands.end(), value) == kCommands.end())
    schema("command", "unknown command \"" + value + "\"");
  cfg.source = dump17(doc);
}

RunOutcome run_pipeline(const RunConfig& cfg) {
  if (cfg.threads > 0) set_thread_count(cfg.threads);
  Context cx{cfg, cfg.out_dir, {}, {}, json::object(), nullptr, {}, std::nullopt};
  std::error_code ec;
  std::filesystem::create_directories(cx.dir, ec);
  if (ec) fail(ErrorCode::IOError, "cannot create output directory " + cfg.out_dir + ": " + ec.message());
  cx.write("config.json", cfg.source + "\n");
  cx.log << "# schema_version=" << kSchemaVersion << " run.log\ncommand: " << cfg.command << "\nseed: " << cfg.seed << "\n";
  cx.summary["schema_version"] = kSchemaVersion;
  cx.summary["command"] = cfg.command;

  RunOutcome out;
  auto finish = [&] {
    cx.write("run.log", cx.log.str());
    cx.summary["exit_code"] = out.exit_code;
    cx.summary["files"] = cx.files;
    out.files = cx.files;
    out.summary = dump17(cx.summary);
    return out;
  };
  try {
    const std::string& c = cfg.command;
    if (c == "weyl") {
      weyl(cx);
      return finish();
    }
    if (c == "transversal") {
      transversal(cx);
      return finish();
    }
    if (c == "mean" && cfg.has_real) {
      mean(cx, std::nullopt);
      return finish();
    }
    build_lattice(cx);
    if (c == "lattice") return finish();
    geometry(cx, c != "geometry");
    if (c == "geometry") return finish();
    if (c == "zeros") {
      zeros(cx);
      return finish();
    }
    std::optional<Prediction> pred;
    if (c == "predict" || c == "verify" || cfg.n == 1 || !cfg.k_file.empty()) pred = predict(cx);
    if (c == "predict") return finish();
    const auto rep = mean(cx, pred);
    if (c == "verify") {
      const auto cmp = compare_values(rep.extrapolated, pred->total, cfg.tol_compare);
      json j;
      j["schema_version"] = kSchemaVersion;
      j["predicted"] = complex_json(pred->total);
      j["estimate"] = complex_json(rep.extrapolated);
      j["abs_err"] = cmp.abs_err;
      j["rel_err"] = cmp.rel_err;
      j["tolerance"] = cfg.tol_compare;
      j["pass"] = cmp.pass;
      j["extend_lambda"] = cmp.extend_lambda;
      cx.write_json("verify.json", j);
      cx.summary["pass"] = cmp.pass;
      cx.summary["discrepancy"] = cmp.abs_err;
      cx.log << "verify: " << (cmp.pass ? "pass" : "fail") << " abs_err " << fmt(cmp.abs_err) << "\n";
      if (!cmp.pass) out.exit_code = 2;
    }
    return finish();
  } catch (const Error& e) {
    cx.log << "error: " << e.qualified() << "\n";
    cx.write("run.log", cx.log.str());
    throw;
  }
}

}  // namespace expsum
