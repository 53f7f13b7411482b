#pragma once

#include <stdexcept>
#include <string>

namespace dpptest {

enum class ErrorCode {
  InvalidArgument,
  NotSymmetric,
  SpectrumOutOfRange,
  GroundSetTooLarge,
  NormalityViolated,
  SingularMatrix,
  EmptyBatch,
  DegenerateZeta,
  DegenerateZ,
  CandidateBudgetExceeded,
  DimensionMismatch,
  InsufficientSamples,
  EpsilonPrimeOutOfRange,
  PreconditionViolated,
  NotWitness,
  FamilyMemberNotLogSubmodular,
  TooLarge,
  ParseError,
  IoError,
};

const char* to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries one of the codes above so that
// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace dpptest
