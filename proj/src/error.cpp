#include "structcode/error.hpp"

namespace structcode {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyLabel: return "EmptyLabel";
    case ErrorCode::InvalidGraph: return "InvalidGraph";
    case ErrorCode::CyclicGraph: return "CyclicGraph";
    case ErrorCode::FormatMismatch: return "FormatMismatch";
    case ErrorCode::MissingGold: return "MissingGold";
    case ErrorCode::ParseFailure: return "ParseFailure";
    case ErrorCode::EmptyStructure: return "EmptyStructure";
    case ErrorCode::UnterminatedString: return "UnterminatedString";
    case ErrorCode::InconsistentIndent: return "InconsistentIndent";
    case ErrorCode::KTooLarge: return "KTooLarge";
    case ErrorCode::BudgetExhausted: return "BudgetExhausted";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::HttpError: return "HttpError";
    case ErrorCode::MissingOracleEntry: return "MissingOracleEntry";
    case ErrorCode::Timeout: return "Timeout";
    case ErrorCode::PromptTooLarge: return "PromptTooLarge";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::SizeLimitExceeded: return "SizeLimitExceeded";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::SeedMismatch: return "SeedMismatch";
    case ErrorCode::Io: return "Io";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace structcode
