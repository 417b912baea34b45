#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nctk {

enum class ErrorCode {
  OddDimension,
  NotAntisymmetric,
  DegenerateTheta,
  DimensionMismatch,
  NotPositiveDefinite,
  UnsupportedOrder,
  DivergentStar,
  DegreeTooHigh,
  MismatchedLambda,
  UnknownOpTag,
  QuadratureNotConverged,
  TruncationTooSmall,
  NotInvertibleField,
  FrameMismatch,
  NormDriftExceeded,
  NonHermitianHamiltonian,
  GridTooCoarse,
  UnsupportedPotential,
  InvalidArgument,
  ParseError,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for the toolkit; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace nctk
