#include "terracut/error.hpp"

namespace terracut {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ZeroDenominator: return "ZeroDenominator";
    case ErrorCode::ConstantColumn: return "ConstantColumn";
    case ErrorCode::IdMismatch: return "IdMismatch";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DegenerateGeometry: return "DegenerateGeometry";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DisconnectedGraph: return "DisconnectedGraph";
    case ErrorCode::KOutOfRange: return "KOutOfRange";
    case ErrorCode::SingleCluster: return "SingleCluster";
    case ErrorCode::NoValidRow: return "NoValidRow";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::DegenerateClass: return "DegenerateClass";
    case ErrorCode::BadReference: return "BadReference";
    case ErrorCode::FoldTooSmall: return "FoldTooSmall";
    case ErrorCode::IoFailure: return "IoFailure";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

int exit_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonConvergence: return 3;
    case ErrorCode::IoFailure: return 4;
    default: return 2;
  }
}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace terracut
