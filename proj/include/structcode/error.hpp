#pragma once

#include <stdexcept>
#include <string>

namespace structcode {

enum class ErrorCode {
  EmptyLabel,
  InvalidGraph,
  CyclicGraph,
  FormatMismatch,
  MissingGold,
  ParseFailure,
  EmptyStructure,
  UnterminatedString,
  InconsistentIndent,
  KTooLarge,
  BudgetExhausted,
  DimensionMismatch,
  EmptyInput,
  HttpError,
  MissingOracleEntry,
  Timeout,
  PromptTooLarge,
  ShapeMismatch,
  SizeLimitExceeded,
  SchemaError,
  SeedMismatch,
  Io,
  InvalidArgument,
};

const char* to_string(ErrorCode code);

// Every failure in the library is reported through this type. `line` and
// `column` are 1-based and 0 when the error has no source position; `status`
// carries the HTTP status for HttpError and `field` the offending JSON field for
// SchemaError.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, int line = 0, int column = 0)
      : std::runtime_error(message), code_(code), line_(line), column_(column) {}

  ErrorCode code() const noexcept { return code_; }
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }
  int status() const noexcept { return status_; }
  const std::string& field() const noexcept { return field_; }
  Error& with_status(int status) {
    status_ = status;
    return *this;
  }
  Error& with_field(std::string field) {
    field_ = std::move(field);
    return *this;
  }

 private:
  ErrorCode code_;
  int line_;
  int column_;
  int status_ = 0;
  std::string field_;
};

}  // namespace structcode
