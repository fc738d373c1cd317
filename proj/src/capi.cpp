#include "expsum/expsum.h"

#include "expsum/cli_runner.hpp"
#include "expsum/error.hpp"
#include "expsum/freq_lattice.hpp"
#include "expsum/parallel.hpp"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

struct expsum_lattice {
  expsum::FrequencyLattice lattice;
};

struct expsum_problem {
  expsum::RunConfig config;
};

namespace {

thread_local std::string last_error;

expsum_status fail_with(expsum_status s, std::string msg) {
  last_error = std::move(msg);
  return s;
}

template <class F>
expsum_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return EXPSUM_OK;
  } catch (const expsum::Error& e) {
    return fail_with(static_cast<expsum_status>(e.code()), e.qualified());
  } catch (const std::bad_alloc&) {
    return fail_with(EXPSUM_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail_with(EXPSUM_INTERNAL, e.what());
  }
}

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

std::vector<std::string> strings(const char* const* exprs, std::size_t count) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < count; ++i) {
    if (!exprs[i]) expsum::fail(expsum::ErrorCode::InvalidArgument, "null expression");
    out.emplace_back(exprs[i]);
  }
  return out;
}

}  // namespace

extern "C" {

const char* expsum_status_name(expsum_status status) {
  if (status == EXPSUM_OK) return "OK";
  if (status < EXPSUM_INVALID_ARGUMENT || status > EXPSUM_INTERNAL) return "Unknown";
  return expsum::error_code_name(static_cast<expsum::ErrorCode>(status)).data();
}

const char* expsum_last_error(void) { return last_error.c_str(); }

const char* expsum_version(void) { return "1.0.0"; }

void expsum_free_string(char* s) { std::free(s); }

expsum_status expsum_set_threads(size_t threads) {
  return guarded([&] { expsum::set_thread_count(threads); });
}

expsum_status expsum_parse_frequency(const char* const* exprs, size_t n, double* out) {
  if (!exprs || !out) return fail_with(EXPSUM_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const auto v = expsum::parse_frequency(strings(exprs, n)).real();
    for (std::size_t i = 0; i < n; ++i) out[i] = v(static_cast<Eigen::Index>(i));
  });
}

expsum_status expsum_lattice_create(const char* const* exprs, size_t count, size_t n, int64_t K, double eps,
                                    expsum_lattice** out) {
  if (!exprs || !out || n == 0) return fail_with(EXPSUM_INVALID_ARGUMENT, "null argument or zero dimension");
  *out = nullptr;
  return guarded([&] {
    std::vector<expsum::Frequency> fs;
    for (std::size_t i = 0; i < count; ++i) fs.push_back(expsum::parse_frequency(strings(exprs + i * n, n)));
    *out = new expsum_lattice{expsum::find_basis(fs, K, eps)};
  });
}

size_t expsum_lattice_rank(const expsum_lattice* lattice) { return lattice ? lattice->lattice.rank() : 0; }

expsum_status expsum_lattice_coords(const expsum_lattice* lattice, size_t index, int64_t* out) {
  if (!lattice || !out) return fail_with(EXPSUM_INVALID_ARGUMENT, "null argument");
  const auto& coords = lattice->lattice.input_coords();
  if (index >= coords.size()) return fail_with(EXPSUM_INVALID_ARGUMENT, "input index out of range");
  for (std::size_t i = 0; i < coords[index].size(); ++i) out[i] = coords[index][i];
  last_error.clear();
  return EXPSUM_OK;
}

expsum_status expsum_lattice_describe(const expsum_lattice* lattice, char** out) {
  if (!lattice || !out) return fail_with(EXPSUM_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = dup(lattice->lattice.describe()); });
}

void expsum_lattice_free(expsum_lattice* lattice) { delete lattice; }

expsum_status expsum_problem_from_json(const char* json, expsum_problem** out) {
  if (!json || !out) return fail_with(EXPSUM_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] { *out = new expsum_problem{expsum::parse_run_config(json)}; });
}

expsum_status expsum_problem_override(expsum_problem* problem, const char* field, const char* value) {
  if (!problem || !field || !value) return fail_with(EXPSUM_INVALID_ARGUMENT, "null argument");
  return guarded([&] { expsum::apply_override(problem->config, field, value); });
}

void expsum_problem_free(expsum_problem* problem) { delete problem; }

expsum_status expsum_run(const expsum_problem* problem, int* exit_code, char** summary) {
  if (!problem || !exit_code) return fail_with(EXPSUM_INVALID_ARGUMENT, "null argument");
  if (summary) *summary = nullptr;
  return guarded([&] {
    const auto outcome = expsum::run_pipeline(problem->config);
    *exit_code = outcome.exit_code;
    if (summary) *summary = dup(outcome.summary);
  });
}

}  // extern "C"
