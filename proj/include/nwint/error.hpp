#pragma once

#include <stdexcept>
#include <string>

namespace nwint {

// Every failure the library reports. Inconclusive search outcomes are not
// errors; they are returned as ordinary values.
enum class ErrorCode {
  InvalidArgument = 1,
  InvalidSpec,
  DivisorContainsZero,
  NegativeSqrtDomain,
  DegenerateTarget,
  InfeasibleMass,
  DepthTooSmall,
  DivergentTail,
  NotDominant,
  NonPrimeTheta,
  NotDisjoint,
  IntervalTooShort,
  OutOfRange,
  ConstantTermPresent,
  ZeroPolynomial,
  ZeroInput,
  ZeroCombination,
  NonterminationBudget,
  Unsupported,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace nwint
