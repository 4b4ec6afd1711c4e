#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vnpair {

enum class ErrorKind {
  DimensionMismatch,
  SingularInput,
  NonConvergence,
  DegenerateCenterElement,
  NotUnital,
  NotMultiplicative,
  NotStar,
  ImageOutsideAlgebra,
  NotUnitary,
  AlgebraNotInvariant,
  DomainMismatch,
  AlgebraMismatch,
  GramNotPSD,
  NotIsometric,
  NotIntertwining,
  PolarRetryExhausted,
  NotFaithful,
  NotFullAlgebra,
  NotUnitVector,
  NoUnitVector,
  ValidationFailure,
  NotUnimodular,
  CocycleViolation,
  BoundaryViolation,
  TrivializationResidual,
  GridMismatch,
  NotScalar,
  RelationB,
  RelationBPrime,
  NotUnitaryImage,
  PairingCheckFailed,
  DomainsNotCommutant,
  NotPairedInput,
  CocycleResidual,
  InternalError,
  ParseError,
};

std::string_view to_string(ErrorKind k);

// Every failure carries a kind, a message and (when meaningful) the worst residual.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what, double residual = 0.0);

  ErrorKind kind() const noexcept { return kind_; }
  double residual() const noexcept { return residual_; }

 private:
  ErrorKind kind_;
  double residual_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what, double residual = 0.0);

}  // namespace vnpair
