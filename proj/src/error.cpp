#include "maas/error.hpp"

namespace maas {

std::string_view error_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MismatchedDetectors: return "MismatchedDetectors";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::NonFiniteScore: return "NonFiniteScore";
    case ErrorCode::EmptyBank: return "EmptyBank";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::InvalidGrid: return "InvalidGrid";
    case ErrorCode::DegenerateThresholds: return "DegenerateThresholds";
    case ErrorCode::UnknownDetector: return "UnknownDetector";
    case ErrorCode::AlreadyFilled: return "AlreadyFilled";
    case ErrorCode::NotFilled: return "NotFilled";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::MissingWeight: return "MissingWeight";
    case ErrorCode::ConstantTrack: return "ConstantTrack";
    case ErrorCode::MissingThreshold: return "MissingThreshold";
    case ErrorCode::SingleClassLabels: return "SingleClassLabels";
    case ErrorCode::UnknownStrategy: return "UnknownStrategy";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::MissingConfig: return "MissingConfig";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IOError: return "IOError";
  }
  return "UnknownError";
}

int exit_status(ErrorCode code) noexcept {
  // 1 is reserved for usage errors reported by the argument parser.
  return 10 + static_cast<int>(code);
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(error_name(code)) + ": " + detail),
      code_(code),
      detail_(detail) {}

}  // namespace maas
