#ifndef SLMS_ERROR_HPP
#define SLMS_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace slms {

enum class ErrorCode {
  // problem validation
  BadInterval,
  EpsilonOutOfRange,
  DegenerateLeftBC,
  ZeroTransmission,
  RhoNotPositive,
  BadPotentialTable,
  OutOfDomain,
  MissingSideFlag,
  InvalidArgument,
  // numerical failures
  ToleranceNotReached,
  NoSignChange,
  MaxIterations,
  NonFiniteValue,
  IntegratorFailure,
  ScanRangeExhausted,
  SuspectedDoubleRoot,
  DegenerateRatio,
  NearEigenvaluePole,
  MismatchedProvenance,
  // front end
  ConfigError,
  IoError,
};

inline constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::BadInterval: return "BadInterval";
    case ErrorCode::EpsilonOutOfRange: return "EpsilonOutOfRange";
    case ErrorCode::DegenerateLeftBC: return "DegenerateLeftBC";
    case ErrorCode::ZeroTransmission: return "ZeroTransmission";
    case ErrorCode::RhoNotPositive: return "RhoNotPositive";
    case ErrorCode::BadPotentialTable: return "BadPotentialTable";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::MissingSideFlag: return "MissingSideFlag";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ToleranceNotReached: return "ToleranceNotReached";
    case ErrorCode::NoSignChange: return "NoSignChange";
    case ErrorCode::MaxIterations: return "MaxIterations";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::IntegratorFailure: return "IntegratorFailure";
    case ErrorCode::ScanRangeExhausted: return "ScanRangeExhausted";
    case ErrorCode::SuspectedDoubleRoot: return "SuspectedDoubleRoot";
    case ErrorCode::DegenerateRatio: return "DegenerateRatio";
    case ErrorCode::NearEigenvaluePole: return "NearEigenvaluePole";
    case ErrorCode::MismatchedProvenance: return "MismatchedProvenance";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

/// True for errors caused by the input data rather than by a numerical
/// procedure (the CLI maps these to exit code 2).
inline constexpr bool is_validation_error(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::BadInterval:
    case ErrorCode::EpsilonOutOfRange:
    case ErrorCode::DegenerateLeftBC:
    case ErrorCode::ZeroTransmission:
    case ErrorCode::RhoNotPositive:
    case ErrorCode::BadPotentialTable:
    case ErrorCode::OutOfDomain:
    case ErrorCode::MissingSideFlag:
    case ErrorCode::InvalidArgument:
    case ErrorCode::ConfigError:
      return true;
    default:
      return false;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace slms

#endif  // SLMS_ERROR_HPP
