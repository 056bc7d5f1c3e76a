#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace polarize {

enum class ErrorKind {
  UnboundedSpace,
  EmptySpace,
  DimensionMismatch,
  InvalidShape,
  LevelOverflow,
  UnknownLetter,
  CapacityError,
  LevelTooLow,
  ShapeRequired,
  ZeroColumn,
  ZeroRow,
  DomainError,
  InvalidArgument,
  ParseError,
  IOError,
  BackendFailure,
};

std::string_view to_string(ErrorKind kind);

/// Exception type for every recoverable failure in the toolkit. The kind is
/// what callers branch on; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::UnboundedSpace: return "UnboundedSpace";
    case ErrorKind::EmptySpace: return "EmptySpace";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::InvalidShape: return "InvalidShape";
    case ErrorKind::LevelOverflow: return "LevelOverflow";
    case ErrorKind::UnknownLetter: return "UnknownLetter";
    case ErrorKind::CapacityError: return "CapacityError";
    case ErrorKind::LevelTooLow: return "LevelTooLow";
    case ErrorKind::ShapeRequired: return "ShapeRequired";
    case ErrorKind::ZeroColumn: return "ZeroColumn";
    case ErrorKind::ZeroRow: return "ZeroRow";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::IOError: return "IOError";
    case ErrorKind::BackendFailure: return "BackendFailure";
  }
  return "Unknown";
}

}  // namespace polarize
