#include "nwint/error.hpp"

namespace nwint {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::DivisorContainsZero: return "DivisorContainsZero";
    case ErrorCode::NegativeSqrtDomain: return "NegativeSqrtDomain";
    case ErrorCode::DegenerateTarget: return "DegenerateTarget";
    case ErrorCode::InfeasibleMass: return "InfeasibleMass";
    case ErrorCode::DepthTooSmall: return "DepthTooSmall";
    case ErrorCode::DivergentTail: return "DivergentTail";
    case ErrorCode::NotDominant: return "NotDominant";
    case ErrorCode::NonPrimeTheta: return "NonPrimeTheta";
    case ErrorCode::NotDisjoint: return "NotDisjoint";
    case ErrorCode::IntervalTooShort: return "IntervalTooShort";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::ConstantTermPresent: return "ConstantTermPresent";
    case ErrorCode::ZeroPolynomial: return "ZeroPolynomial";
    case ErrorCode::ZeroInput: return "ZeroInput";
    case ErrorCode::ZeroCombination: return "ZeroCombination";
    case ErrorCode::NonterminationBudget: return "NonterminationBudget";
    case ErrorCode::Unsupported: return "Unsupported";
  }
  return "Unknown";
}

}  // namespace nwint
