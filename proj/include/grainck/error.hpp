#pragma once

#include <stdexcept>
#include <string>

namespace grainck {

enum class ErrorCode {
  ParseError,
  SpecError,
  InvalidKey,
  MissingIso,
  EmptyNaturalKey,
  FieldNotInSchema,
  DuplicateField,
  EmptyInput,
  NotUnionCompatible,
  GrainMismatch,
  SchemaMismatch,
  CycleDetected,
  UnknownReference,
  UnknownNode,
  InfeasibleSpec,
  UnsupportedOp,
  Internal,
};

const char* error_code_name(ErrorCode code);

// Thrown for unrecoverable analysis failures. Recoverable findings are
// reported as Diagnostic values instead (see verify.hpp).
struct AnalysisError : std::runtime_error {
  AnalysisError(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code(code) {}

  ErrorCode code;
};

}  // namespace grainck
