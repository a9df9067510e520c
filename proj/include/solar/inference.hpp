#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "solar/ontology.hpp"
#include "solar/serialization.hpp"

namespace solar {

/// One rule application: the rule, the premise facts it matched, and the
/// variable bindings (including witnesses for body-only variables).
struct ProofStep {
  std::string derived;
  std::string rule;
  std::vector<std::string> premises;
  /// Confidence of each premise, parallel to `premises`. Inferred facts
  /// always carry 1.0; premise confidences are reported, not combined.
  std::vector<double> premise_confidences;
  std::map<std::string, Arg> substitution;
};

struct ProofTrace {
  std::vector<ProofStep> steps;
  /// Index of the first step of each stratum.
  std::vector<std::size_t> stratum_boundaries;
  /// Every derived assertion and every premise cited by a step, by id.
  std::map<std::string, Assertion> assertions;
  /// Rules cited by steps, by id.
  std::map<std::string, Rule> rules;

  const ProofStep* step_for(std::string_view assertion_id) const;
};

struct InferenceOptions {
  std::size_t max_derived = 100'000;
};

struct InferenceResult {
  /// Newly derived assertions, ordered by predicate then arguments.
  std::vector<Assertion> inferred;
  ProofTrace trace;
};

class DerivationCapError : public Error {
 public:
  DerivationCapError(std::size_t cap, InferenceResult partial);
  const InferenceResult& partial() const { return partial_; }

 private:
  InferenceResult partial_;
};

/// Least model of the TBox rules over the ABox facts, computed stratum by
/// stratum with semi-naive evaluation. Throws StratificationError,
/// Error(UnboundEvaluation) or DerivationCapError.
InferenceResult infer(const TBox& tbox, const ABox& abox, const InferenceOptions& options = {});

struct ExplanationNode {
  Assertion assertion;
  /// Empty for leaves (facts that were not derived).
  std::string rule_id;
  std::string rule_text;
  std::string rule_description;
  std::vector<ExplanationNode> children;

  /// Longest root-to-leaf path, in edges.
  int depth() const;
  std::size_t leaf_count() const;
};

/// Derivation tree of an inferred assertion. Throws Error(UnknownAssertion)
/// when the id was not derived in `trace`.
ExplanationNode explain(std::string_view assertion_id, const ProofTrace& trace);

std::string render(const ExplanationNode& node);

Json to_json(const ProofTrace& trace);
ProofTrace trace_from_json(const Json& j);

}  // namespace solar
