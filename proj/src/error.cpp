#include "expsum/error.hpp"

namespace expsum {

std::string_view error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::RelationUndetectable: return "RelationUndetectable";
    case ErrorCode::LatticeMismatch: return "LatticeMismatch";
    case ErrorCode::NotAVertex: return "NotAVertex";
    case ErrorCode::ConeViolation: return "ConeViolation";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::DimensionUnsupported: return "DimensionUnsupported";
    case ErrorCode::NotDeveloped: return "NotDeveloped";
    case ErrorCode::MissingCoefficients: return "MissingCoefficients";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::BoundaryZero: return "BoundaryZero";
    case ErrorCode::OrbitDegenerate: return "OrbitDegenerate";
    case ErrorCode::TracingStalled: return "TracingStalled";
    case ErrorCode::DegenerateSegment: return "DegenerateSegment";
    case ErrorCode::IsolationUndecided: return "IsolationUndecided";
    case ErrorCode::IOError: return "IOError";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

std::string_view error_code_module(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::RelationUndetectable: return "freq_lattice";
    case ErrorCode::LatticeMismatch:
    case ErrorCode::NotAVertex:
    case ErrorCode::ConeViolation: return "exp_algebra";
    case ErrorCode::DegenerateInput:
    case ErrorCode::DimensionUnsupported: return "newton_geometry";
    case ErrorCode::NotDeveloped:
    case ErrorCode::MissingCoefficients:
    case ErrorCode::DegenerateSegment: return "gkh_formula";
    case ErrorCode::NoConvergence:
    case ErrorCode::BoundaryZero: return "zero_finder";
    case ErrorCode::OrbitDegenerate:
    case ErrorCode::TracingStalled:
    case ErrorCode::IsolationUndecided: return "torus_lab";
    case ErrorCode::SyntaxError:
    case ErrorCode::DomainError:
    case ErrorCode::IOError:
    case ErrorCode::SchemaError: return "cli_runner";
    case ErrorCode::InvalidArgument:
    case ErrorCode::Internal: return "core";
  }
  return "core";
}

std::string Error::qualified() const {
  std::string out(error_code_module(code_));
  out += '.';
  out += error_code_name(code_);
  out += ": ";
  out += what();
  return out;
}

}  // namespace expsum
