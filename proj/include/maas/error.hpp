#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace maas {

enum class ErrorCode {
  MismatchedDetectors,
  GridMismatch,
  NonFiniteScore,
  EmptyBank,
  EmptyInput,
  InvalidGrid,
  DegenerateThresholds,
  UnknownDetector,
  AlreadyFilled,
  NotFilled,
  LengthMismatch,
  MissingWeight,
  ConstantTrack,
  MissingThreshold,
  SingleClassLabels,
  UnknownStrategy,
  InvalidSpec,
  InvalidConfig,
  MissingConfig,
  ParseError,
  IOError,
};

std::string_view error_name(ErrorCode code) noexcept;

/// Process exit status used by the command-line tool for each error kind.
int exit_status(ErrorCode code) noexcept;

/// Every failure in the library is reported through this type; `what()`
/// reads "<ErrorName>: <detail>".
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail);

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace maas
