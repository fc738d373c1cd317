#pragma once

#include "expsum/exp_algebra.hpp"
#include "expsum/window.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace expsum {

struct TermSpec {
  Complex coef;
  std::vector<std::string> freq;  // one expression per coordinate
};

struct TrigTermSpec {
  std::vector<std::string> freq;
  double c = 0.0;
  double d = 0.0;
};

struct TorusTermSpec {
  Exponent k;
  double c = 0.0;
  double d = 0.0;
};

struct ClauseSpec {
  std::vector<std::vector<TrigTermSpec>> equalities;
  std::vector<std::vector<TrigTermSpec>> positives;
};

/// Parsed experiment configuration. Field names follow the JSON keys documented in the README.
struct RunConfig {
  std::string command = "verify";
  std::size_t n = 1;
  std::vector<std::vector<TermSpec>> system;
  std::vector<TermSpec> G;
  WindowSpec window;
  std::optional<std::vector<std::pair<double, double>>> zero_window;

  double tol_residual = 1e-10;
  double tol_compare = 1e-3;
  double tol_separation = 1e-6;
  double tol_boundary = 1e-12;
  double tol_convergence = 1e-2;
  std::int64_t K = 50;
  double eps = 1e-9;
  std::uint64_t seed = 20240601;
  std::size_t threads = 0;
  std::string k_file;
  std::string out_dir = "expsum_run";

  // weyl / transversal: torus built from these generators
  std::vector<std::vector<std::string>> torus_generators;
  std::vector<TorusTermSpec> weyl_f;
  std::vector<std::vector<TorusTermSpec>> torus_equalities;
  std::vector<std::vector<TorusTermSpec>> torus_positives;
  std::vector<TorusTermSpec> torus_weight;

  // mean over a real semitrigonometric set instead of complex zeros
  std::vector<ClauseSpec> real_clauses;
  std::vector<TrigTermSpec> real_weight;
  bool has_real = false;

  std::string source;  // config JSON with overrides applied
};

// Throws SchemaError with the offending key path.
RunConfig parse_run_config(const std::string& json_text);

// CLI overrides: command, seed, threads, tol_residual, tol_compare, out_dir, k_file.
void apply_override(RunConfig& cfg, const std::string& field, const std::string& value);

struct RunOutcome {
  int exit_code = 0;                // 0 pass, 2 comparison failed
  std::string summary;              // JSON
  std::vector<std::string> files;   // artifacts written, relative to out_dir
};

/// Runs lattice -> geometry (developed gate) -> prediction -> zeros -> mean -> comparison,
/// stopping after the configured command. Writes artifacts into cfg.out_dir.
RunOutcome run_pipeline(const RunConfig& cfg);

}  // namespace expsum
