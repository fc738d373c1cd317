// Command line front end over the C API.
//   expsum_cli <command> --config run.json [--seed N] [--threads N] ...
// Exit status: 0 success, 1 error, 2 verification comparison failed.
#include "expsum/expsum.h"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace {

int report(expsum_status s) {
  std::cerr << "error: " << (*expsum_last_error() ? expsum_last_error() : expsum_status_name(s)) << "\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mean values over zeros of exponential sums"};
  std::string command, config_path;
  std::optional<std::string> seed, threads, tol_residual, tol_compare, out_dir, k_file;
  bool quiet = false;
  app.add_option("command", command, "lattice | geometry | predict | zeros | mean | weyl | transversal | verify")
      ->check(CLI::IsMember({"lattice", "geometry", "predict", "zeros", "mean", "weyl", "transversal", "verify"}));
  app.add_option("-c,--config", config_path, "experiment configuration (JSON)")->required()->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "random seed for generic perturbations");
  app.add_option("--threads", threads, "worker threads (0 = automatic)");
  app.add_option("--tol-residual", tol_residual, "zero residual tolerance");
  app.add_option("--tol-compare", tol_compare, "relative tolerance for verify");
  app.add_option("-o,--out-dir", out_dir, "artifact directory");
  app.add_option("--k-file", k_file, "vertex coefficients k(m) for n >= 2 predictions");
  app.add_flag("-q,--quiet", quiet, "do not print the run summary");
  CLI11_PARSE(app, argc, argv);

  std::ifstream in(config_path, std::ios::binary);
  std::stringstream text;
  text << in.rdbuf();
  if (!in) {
    std::cerr << "error: cannot read " << config_path << "\n";
    return 1;
  }

  expsum_problem* problem = nullptr;
  if (auto s = expsum_problem_from_json(text.str().c_str(), &problem); s != EXPSUM_OK) return report(s);

  std::vector<std::pair<const char*, std::optional<std::string>>> overrides = {
      {"seed", seed},       {"threads", threads},     {"tol_residual", tol_residual},
      {"tol_compare", tol_compare}, {"out_dir", out_dir}, {"k_file", k_file}};
  if (!command.empty()) overrides.insert(overrides.begin(), {"command", command});
  for (const auto& [field, value] : overrides) {
    if (!value) continue;
    if (auto s = expsum_problem_override(problem, field, value->c_str()); s != EXPSUM_OK) {
      expsum_problem_free(problem);
      return report(s);
    }
  }

  int exit_code = 0;
  char* summary = nullptr;
  const expsum_status s = expsum_run(problem, &exit_code, &summary);
  expsum_problem_free(problem);
  if (s != EXPSUM_OK) return report(s);
  if (!quiet) std::cout << summary << "\n";
  expsum_free_string(summary);
  return exit_code;
}
