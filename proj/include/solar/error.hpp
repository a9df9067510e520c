#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace solar {

/// Failure categories raised as exceptions. Validation findings are data and
/// never travel through this type.
enum class ErrorCode {
  InvalidArgument,
  ParseError,
  EmptyBody,
  NotStratifiable,
  UnboundEvaluation,
  DerivationCap,
  UnknownAssertion,
  TypeMismatch,
  DuplicateAssertionId,
  MissingSchedule,
  NoIncomeAssertions,
  MultipleTaxpayersAmbiguous,
  BackendUnavailable,
  MalformedCase,
  MalformedDocument,
  Exhausted,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace solar
