#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lcqft {

enum class ErrorKind {
  OutOfDomain,
  OutOfWindow,
  InvalidSpacetime,
  NotInjective,
  NotIsometric,
  CausalConvexityViolated,
  OrientationViolated,
  GridMismatch,
  DomainMismatch,
  WindowTooSmall,
  AmbientMismatch,
  StateUnavailable,
  NotCausallyConvex,
  NotLocalized,
  NotCausallySeparated,
  SupportsNotSeparated,
  NotStandard,
  DimensionMismatch,
  ConfigError,
  IoError,
};

constexpr std::string_view to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::OutOfDomain: return "OutOfDomain";
    case ErrorKind::OutOfWindow: return "OutOfWindow";
    case ErrorKind::InvalidSpacetime: return "InvalidSpacetime";
    case ErrorKind::NotInjective: return "NotInjective";
    case ErrorKind::NotIsometric: return "NotIsometric";
    case ErrorKind::CausalConvexityViolated: return "CausalConvexityViolated";
    case ErrorKind::OrientationViolated: return "OrientationViolated";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::DomainMismatch: return "DomainMismatch";
    case ErrorKind::WindowTooSmall: return "WindowTooSmall";
    case ErrorKind::AmbientMismatch: return "AmbientMismatch";
    case ErrorKind::StateUnavailable: return "StateUnavailable";
    case ErrorKind::NotCausallyConvex: return "NotCausallyConvex";
    case ErrorKind::NotLocalized: return "NotLocalized";
    case ErrorKind::NotCausallySeparated: return "NotCausallySeparated";
    case ErrorKind::SupportsNotSeparated: return "SupportsNotSeparated";
    case ErrorKind::NotStandard: return "NotStandard";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace lcqft
