#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace terracut {

enum class ErrorCode {
  InvalidArgument,
  ZeroDenominator,
  ConstantColumn,
  IdMismatch,
  ParseError,
  DegenerateGeometry,
  DimensionMismatch,
  DisconnectedGraph,
  KOutOfRange,
  SingleCluster,
  NoValidRow,
  NonConvergence,
  DegenerateClass,
  BadReference,
  FoldTooSmall,
  IoFailure,
};

std::string_view to_string(ErrorCode code);

/// Every library failure is reported as an Error carrying a code; the CLI maps
/// codes onto process exit statuses via exit_status().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// 2 for input validation, 3 for numerical non-convergence, 4 for I/O.
int exit_status(ErrorCode code);

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace terracut
