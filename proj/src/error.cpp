#include "solar/error.hpp"

namespace solar {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::ParseError: return "PARSE_ERROR";
    case ErrorCode::EmptyBody: return "EMPTY_BODY";
    case ErrorCode::NotStratifiable: return "NOT_STRATIFIABLE";
    case ErrorCode::UnboundEvaluation: return "UNBOUND_EVALUATION";
    case ErrorCode::DerivationCap: return "DERIVATION_CAP";
    case ErrorCode::UnknownAssertion: return "UNKNOWN_ASSERTION";
    case ErrorCode::TypeMismatch: return "TYPE_MISMATCH";
    case ErrorCode::DuplicateAssertionId: return "DUPLICATE_ASSERTION_ID";
    case ErrorCode::MissingSchedule: return "MISSING_SCHEDULE";
    case ErrorCode::NoIncomeAssertions: return "NO_INCOME_ASSERTIONS";
    case ErrorCode::MultipleTaxpayersAmbiguous: return "MULTIPLE_TAXPAYERS_AMBIGUOUS";
    case ErrorCode::BackendUnavailable: return "BACKEND_UNAVAILABLE";
    case ErrorCode::MalformedCase: return "MALFORMED_CASE";
    case ErrorCode::MalformedDocument: return "MALFORMED_DOCUMENT";
    case ErrorCode::Exhausted: return "EXHAUSTED";
  }
  return "UNKNOWN";
}

}  // namespace solar
