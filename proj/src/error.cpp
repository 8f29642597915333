#include "perinv/error.hpp"

namespace perinv {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::RankDeficientBasis: return "RankDeficientBasis";
    case ErrorCode::DuplicateMotifPoint: return "DuplicateMotifPoint";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotFullRank: return "NotFullRank";
    case ErrorCode::InvalidOrder: return "InvalidOrder";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NotOneDimensional: return "NotOneDimensional";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::UnrealizablePSD: return "UnrealizablePSD";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::ColumnMismatch: return "ColumnMismatch";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::MissingCellParameter: return "MissingCellParameter";
    case ErrorCode::MalformedLoop: return "MalformedLoop";
    case ErrorCode::UnparsableSymOp: return "UnparsableSymOp";
    case ErrorCode::PartialOccupancy: return "PartialOccupancy";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::SolverFailure: return "SolverFailure";
  }
  return "Unknown";
}

}  // namespace perinv
