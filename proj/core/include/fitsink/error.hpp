#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fitsink {

enum class ErrorCode {
  EmptyMatrix,
  NonPositiveInput,
  NotConverged,
  DivisionByZero,
  DimensionMismatch,
  UnknownLabel,
  GaugeMismatch,
  ParseError,
  MissingColumn,
  SchemaVersionMismatch,
  IoError,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code) noexcept;

// All library failures surface as this exception. what() is prefixed with
// the error name so command-line diagnostics can be grepped.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace fitsink
