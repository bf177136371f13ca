#pragma once

#include <stdexcept>
#include <string>

namespace fdlab {

enum class ErrorCode {
  QOutOfRange,
  LambdaOutOfRange,
  BadParams,
  BadGridSpec,
  GridMismatch,
  QuadratureFailure,
  BracketFailure,
  BisectionFailure,
  GammaDomain,
  NoConvergence,
  StepTooLarge,
  NonFiniteState,
  MassMismatch,
  MassNotZero,
  ConstraintViolated,
  TooFewSamples,
  NonPositiveValues,
  DegenerateWeight,
  ZeroProfile,
  IoError,
};

constexpr const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::QOutOfRange: return "QOutOfRange";
    case ErrorCode::LambdaOutOfRange: return "LambdaOutOfRange";
    case ErrorCode::BadParams: return "BadParams";
    case ErrorCode::BadGridSpec: return "BadGridSpec";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::QuadratureFailure: return "QuadratureFailure";
    case ErrorCode::BracketFailure: return "BracketFailure";
    case ErrorCode::BisectionFailure: return "BisectionFailure";
    case ErrorCode::GammaDomain: return "GammaDomain";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::StepTooLarge: return "StepTooLarge";
    case ErrorCode::NonFiniteState: return "NonFiniteState";
    case ErrorCode::MassMismatch: return "MassMismatch";
    case ErrorCode::MassNotZero: return "MassNotZero";
    case ErrorCode::ConstraintViolated: return "ConstraintViolated";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::NonPositiveValues: return "NonPositiveValues";
    case ErrorCode::DegenerateWeight: return "DegenerateWeight";
    case ErrorCode::ZeroProfile: return "ZeroProfile";
    case ErrorCode::IoError: return "IoError";
  }
  return "UnknownError";
}

struct Error : std::runtime_error {
  ErrorCode code;

  Error(ErrorCode c, const std::string& what_arg)
      : std::runtime_error(std::string(error_code_name(c)) + ": " + what_arg), code(c) {}
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) { throw Error(code, msg); }

}  // namespace fdlab
