#include "vnpair/error.hpp"

namespace vnpair {

std::string_view to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::SingularInput: return "SingularInput";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::DegenerateCenterElement: return "DegenerateCenterElement";
    case ErrorKind::NotUnital: return "NotUnital";
    case ErrorKind::NotMultiplicative: return "NotMultiplicative";
    case ErrorKind::NotStar: return "NotStar";
    case ErrorKind::ImageOutsideAlgebra: return "ImageOutsideAlgebra";
    case ErrorKind::NotUnitary: return "NotUnitary";
    case ErrorKind::AlgebraNotInvariant: return "AlgebraNotInvariant";
    case ErrorKind::DomainMismatch: return "DomainMismatch";
    case ErrorKind::AlgebraMismatch: return "AlgebraMismatch";
    case ErrorKind::GramNotPSD: return "GramNotPSD";
    case ErrorKind::NotIsometric: return "NotIsometric";
    case ErrorKind::NotIntertwining: return "NotIntertwining";
    case ErrorKind::PolarRetryExhausted: return "PolarRetryExhausted";
    case ErrorKind::NotFaithful: return "NotFaithful";
    case ErrorKind::NotFullAlgebra: return "NotFullAlgebra";
    case ErrorKind::NotUnitVector: return "NotUnitVector";
    case ErrorKind::NoUnitVector: return "NoUnitVector";
    case ErrorKind::ValidationFailure: return "ValidationFailure";
    case ErrorKind::NotUnimodular: return "NotUnimodular";
    case ErrorKind::CocycleViolation: return "CocycleViolation";
    case ErrorKind::BoundaryViolation: return "BoundaryViolation";
    case ErrorKind::TrivializationResidual: return "TrivializationResidual";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::NotScalar: return "NotScalar";
    case ErrorKind::RelationB: return "RelationB";
    case ErrorKind::RelationBPrime: return "RelationBPrime";
    case ErrorKind::NotUnitaryImage: return "NotUnitaryImage";
    case ErrorKind::PairingCheckFailed: return "PairingCheckFailed";
    case ErrorKind::DomainsNotCommutant: return "DomainsNotCommutant";
    case ErrorKind::NotPairedInput: return "NotPairedInput";
    case ErrorKind::CocycleResidual: return "CocycleResidual";
    case ErrorKind::InternalError: return "InternalError";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what, double residual)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), residual_(residual) {}

void fail(ErrorKind kind, const std::string& what, double residual) {
  throw Error(kind, what, residual);
}

}  // namespace vnpair
