#include "dpptest/error.hpp"

namespace dpptest {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::SpectrumOutOfRange: return "SpectrumOutOfRange";
    case ErrorCode::GroundSetTooLarge: return "GroundSetTooLarge";
    case ErrorCode::NormalityViolated: return "NormalityViolated";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::EmptyBatch: return "EmptyBatch";
    case ErrorCode::DegenerateZeta: return "DegenerateZeta";
    case ErrorCode::DegenerateZ: return "DegenerateZ";
    case ErrorCode::CandidateBudgetExceeded: return "CandidateBudgetExceeded";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::EpsilonPrimeOutOfRange: return "EpsilonPrimeOutOfRange";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::NotWitness: return "NotWitness";
    case ErrorCode::FamilyMemberNotLogSubmodular: return "FamilyMemberNotLogSubmodular";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace dpptest
