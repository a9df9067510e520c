#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "solar/decimal.hpp"
#include "solar/ontology.hpp"
#include "solar/serialization.hpp"

namespace solar {

enum class FilingStatus { SurvivingSpouse, HeadOfHousehold, MarriedJoint, MarriedSeparate, Single };

std::string_view to_string(FilingStatus status);
std::optional<FilingStatus> parse_filing_status(std::string_view text);

/// Predicate names the interpreter reads. They match the shipped reference TBox.
namespace vocab {
inline constexpr std::string_view kGrossIncome = "hasGrossIncomeAmount";
inline constexpr std::string_view kAdjustedGrossIncome = "hasAdjustedGrossIncomeAmount";
inline constexpr std::string_view kItemizedDeduction = "hasItemizedDeductionAmount";
inline constexpr std::string_view kStandardDeduction = "takesStandardDeduction";
inline constexpr std::string_view kJointReturn = "filesJointReturn";
inline constexpr std::string_view kSpouse = "hasSpouse";
inline constexpr std::string_view kDeceasedSpouse = "hasDeceasedSpouse";
inline constexpr std::string_view kMarried = "isMarriedIndividual";
inline constexpr std::string_view kUnmarried = "isUnmarriedIndividual";
inline constexpr std::string_view kSurvivingSpouse = "isSurvivingSpouse";
inline constexpr std::string_view kHeadOfHousehold = "isHeadOfHousehold";
inline constexpr std::string_view kClaimsDependent = "claimsDependent";
}  // namespace vocab

struct Bracket {
  Decimal lower;
  Decimal rate;
  Decimal base;
  friend bool operator==(const Bracket&, const Bracket&) = default;
};

using BracketTable = std::vector<Bracket>;

/// Year-keyed tax tables. Pure data: swapping the file changes results
/// without code changes.
struct TaxScheduleSet {
  std::map<int, std::map<FilingStatus, BracketTable>> brackets;
  std::map<int, std::map<FilingStatus, Decimal>> standard_deduction;
  std::map<int, Decimal> exemption;

  const BracketTable* table(int year, FilingStatus status) const;
  std::optional<Decimal> standard_deduction_for(int year, FilingStatus status) const;
  std::optional<Decimal> exemption_for(int year) const;
};

/// Problems with a bracket table: must start at 0, lower bounds strictly
/// increasing, rates within [0, 1], bases non-negative.
std::vector<std::string> check_table(const BracketTable& table);

/// Throws Error(MalformedDocument) when any table violates check_table.
TaxScheduleSet schedules_from_json(const Json& j);
Json to_json(const TaxScheduleSet& schedules);
TaxScheduleSet load_schedules(const std::filesystem::path& path);

struct BracketResult {
  std::size_t index = 0;
  /// base + rate * (taxable - lower), not yet rounded.
  Decimal exact;
};

/// Locates the bracket containing `taxable` (the last one whose lower bound
/// is <= taxable) and evaluates it exactly.
BracketResult evaluate_brackets(Decimal taxable, const BracketTable& table);

/// Progressive tax on `taxable`, rounded half-up to cents.
Decimal apply_brackets(Decimal taxable, const BracketTable& table);

struct FilingDetermination {
  FilingStatus status = FilingStatus::Single;
  std::string subject;
  /// Ids of the assertions the decision rests on.
  std::vector<std::string> basis;
};

struct InterpreterConfig {
  /// Order in which statuses are tested; the first that applies wins. Single
  /// is the fallback when none applies.
  std::vector<FilingStatus> precedence{FilingStatus::SurvivingSpouse, FilingStatus::MarriedJoint,
                                       FilingStatus::MarriedSeparate, FilingStatus::HeadOfHousehold,
                                       FilingStatus::Single};
  /// Computation subject; chosen from the ABox when unset.
  std::optional<std::string> subject;
};

/// Individual whose liability is computed. Throws
/// Error(MultipleTaxpayersAmbiguous) or Error(NoIncomeAssertions).
std::string select_subject(const ABox& abox, const std::optional<std::string>& designated = {});

FilingDetermination determine_filing_status(const ABox& abox, const InterpreterConfig& config = {});

struct LogStep {
  std::string label;
  std::vector<Decimal> inputs;
  Decimal output;
  /// Assertion ids or schedule cells such as `brackets[2019][Single][1]`.
  std::vector<std::string> provenance;
};

struct ComputationLog {
  std::vector<LogStep> steps;
  const LogStep* find(std::string_view label) const;
};

struct TaxComputation {
  FilingDetermination filing;
  Decimal gross_income;
  Decimal deduction;
  Decimal exemptions;
  Decimal taxable_income;
  Decimal liability;
  ComputationLog log;
};

/// Pipeline: filing status, gross income, deduction, exemptions, taxable
/// income, bracket application, rounding to cents. Throws
/// Error(MissingSchedule) or Error(NoIncomeAssertions).
TaxComputation compute_tax(const ABox& abox, const TaxScheduleSet& schedules, int tax_year,
                           const InterpreterConfig& config = {});

/// Predicate co-occurrences the interpreter relies on. A TBox that does not
/// state them as usage contracts leaves extraction free to omit them.
std::vector<UsageContract> interpreter_requirements();

Json to_json(const TaxComputation& computation);

}  // namespace solar
