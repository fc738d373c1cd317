#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace expsum {

// Codes are mirrored one-to-one by expsum_status in the C API.
enum class ErrorCode {
  InvalidArgument = 1,
  SyntaxError,
  DomainError,
  RelationUndetectable,
  LatticeMismatch,
  NotAVertex,
  ConeViolation,
  DegenerateInput,
  DimensionUnsupported,
  NotDeveloped,
  MissingCoefficients,
  NoConvergence,
  BoundaryZero,
  OrbitDegenerate,
  TracingStalled,
  DegenerateSegment,
  IsolationUndecided,
  IOError,
  SchemaError,
  Internal,
};

std::string_view error_code_name(ErrorCode code) noexcept;

// Module that raised the error, used for "module.Code" qualified reporting.
std::string_view error_code_module(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  // e.g. "zero_finder.BoundaryZero: ..."
  std::string qualified() const;

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace expsum
