#pragma once

#include <stdexcept>
#include <string>

namespace lubrex {

enum class ErrorCode {
  NotInBasis,
  MissingPredecessor,
  ParseError,
  NonPositiveShape,
  ExceedsUnitHeight,
  QuadratureUnderResolved,
  OutOfStatedRange,
  PointOutsideDomain,
  BinomialDivergence,
  BoundViolation,
  GridMismatch,
  SingularSystem,
  UnresolvedSolution,
};

/// Domain error carrying one of the contract error codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

inline const char* to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::NotInBasis: return "NotInBasis";
    case ErrorCode::MissingPredecessor: return "MissingPredecessor";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NonPositiveShape: return "NonPositiveShape";
    case ErrorCode::ExceedsUnitHeight: return "ExceedsUnitHeight";
    case ErrorCode::QuadratureUnderResolved: return "QuadratureUnderResolved";
    case ErrorCode::OutOfStatedRange: return "OutOfStatedRange";
    case ErrorCode::PointOutsideDomain: return "PointOutsideDomain";
    case ErrorCode::BinomialDivergence: return "BinomialDivergence";
    case ErrorCode::BoundViolation: return "BoundViolation";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::UnresolvedSolution: return "UnresolvedSolution";
  }
  return "UnknownError";
}

}  // namespace lubrex
