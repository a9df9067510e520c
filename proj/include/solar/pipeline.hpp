#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "solar/dataset.hpp"
#include "solar/extraction.hpp"
#include "solar/inference.hpp"
#include "solar/ontology.hpp"
#include "solar/tax.hpp"

namespace solar {

// ---- integration -----------------------------------------------------------

/// "has_spouse", "HasSpouse" -> "hasSpouse".
std::string canonical_property_name(std::string_view name);
/// "surviving_spouse", "survivingSpouse" -> "SurvivingSpouse".
std::string canonical_class_name(std::string_view name);

struct IntegrationLogEntry {
  std::string code;  // DUPLICATE, CONFLICT, RULE_ID
  std::string element;
  std::string message;
};

struct Integration {
  TBox tbox;
  std::vector<IntegrationLogEntry> log;
};

/// Union of the fragments with canonical names. Names that fold to the same
/// lowercase spelling are one element; a second declaration with the same
/// signature is logged as DUPLICATE, a different one as CONFLICT and dropped.
Integration integrate(const std::vector<TBox>& fragments);

// ---- per-case evaluation ---------------------------------------------------

/// Everything one case produced on its way through extraction, validation,
/// inference and the interpreter.
struct StageTwoResult {
  std::string case_id;
  ExtractionResult extraction;
  ValidationReport validation;
  /// TBox contracts and interpreter requirements that the ABox breaks.
  std::vector<UsageContract> unmet_contracts;
  std::optional<InferenceResult> inference;
  std::optional<ABox> enriched;
  std::optional<TaxComputation> computation;
  std::optional<ErrorCode> error;
  std::string error_message;
  double wall_ms = 0.0;

  std::optional<Decimal> answer() const;
};

StageTwoResult run_stage_two(const EvalCase& c, const TBox& tbox, const TaxScheduleSet& schedules,
                             ExtractorBackend& backend, const InterpreterConfig& interpreter = {});

/// Runs every case on up to `jobs` threads; results keep the input order.
std::vector<StageTwoResult> run_stage_two_all(const std::vector<EvalCase>& cases, const TBox& tbox,
                                              const TaxScheduleSet& schedules, ExtractorBackend& backend,
                                              const InterpreterConfig& interpreter = {}, int jobs = 1);

// ---- judge -----------------------------------------------------------------

enum class FailureClass { OntologicalGap, UsagePatternGap, ImplementationError, ExtractionError };

std::string_view to_string(FailureClass c);

struct CaseFailure {
  std::string case_id;
  Decimal expected;
  std::optional<Decimal> got;
  FailureClass classification = FailureClass::ImplementationError;
  std::vector<std::string> evidence;
  /// Missing vocabulary terms (OntologicalGap).
  std::vector<std::string> missing_terms;
  /// Broken contracts (UsagePatternGap).
  std::vector<UsageContract> contracts;
};

/// Checked in order: vocabulary gaps on amount or status text, usage
/// contract violations, quarantined or missing extraction, otherwise the
/// interpreter is at fault.
CaseFailure classify_failure(const EvalCase& c, const StageTwoResult& result);

// ---- refinement loop -------------------------------------------------------

enum class PipelineStatus { Integrating, Validating, Evaluating, Refining, Converged, Exhausted };

std::string_view to_string(PipelineStatus s);

/// Curated vocabulary additions, keyed by term name.
struct PatchLibrary {
  std::map<std::string, PropertyDef> properties;
  std::map<std::string, ClassDef> classes;
};

PatchLibrary load_patches(const std::filesystem::path& dir);

struct Transition {
  PipelineStatus from;
  PipelineStatus to;
  int iteration;
};

struct IterationReport {
  int iteration = 0;
  int tbox_version = 0;
  std::size_t total = 0;
  std::size_t passed = 0;
  std::vector<CaseFailure> failures;
  /// Changes made by the refine step that followed this evaluation.
  std::vector<std::string> applied;
  std::vector<std::string> tickets;
  std::vector<std::string> bug_reports;
};

struct PipelineState {
  TBox tbox;
  int iteration = 0;
  std::vector<CaseFailure> failures;
  PipelineStatus status = PipelineStatus::Integrating;
  std::vector<Transition> transitions;
  std::vector<IterationReport> reports;
  std::vector<IntegrationLogEntry> integration_log;
  /// Elements removed because they failed validation.
  std::vector<std::string> pruned;
  /// TBox snapshot after each version bump, oldest first.
  std::vector<TBox> versions;
};

struct PipelineOptions {
  int max_iterations = 10;
  int jobs = 1;
  InterpreterConfig interpreter;
  PatchLibrary patches;
};

/// Routes each failure: vocabulary tickets from the patch library for
/// OntologicalGap, new usage contracts for UsagePatternGap, bug reports for
/// ImplementationError. Bumps the TBox version when anything changed and
/// records the outcome in the latest iteration report.
void refine(PipelineState& state, const PatchLibrary& patches);

/// Integrating -> Validating -> Evaluating -> (Refining -> Validating ->
/// Evaluating)* -> Converged | Exhausted.
PipelineState run_pipeline(const std::vector<TBox>& fragments, const std::vector<EvalCase>& training,
                           const TaxScheduleSet& schedules, ExtractorBackend& backend,
                           const PipelineOptions& options = {});

Json to_json(const CaseFailure& f);
Json to_json(const IterationReport& r);

}  // namespace solar
