#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "solar/literal.hpp"
#include "solar/rule.hpp"

namespace solar {

struct ClassDef {
  std::string name;
  std::optional<std::string> parent;
  std::string description;
  friend bool operator==(const ClassDef&, const ClassDef&) = default;
};

enum class PropertyKind { Unary, Object, Datatype };

std::string_view to_string(PropertyKind kind);
std::optional<PropertyKind> parse_property_kind(std::string_view text);

/// `object_class` is present only for Object properties and `datatype` only
/// for Datatype properties; validate_tbox reports anything else.
struct PropertyDef {
  std::string name;
  PropertyKind kind = PropertyKind::Unary;
  std::string subject_class;
  std::optional<std::string> object_class;
  std::optional<Datatype> datatype;
  std::string description;

  std::size_t arity() const { return kind == PropertyKind::Unary ? 1 : 2; }
  friend bool operator==(const PropertyDef&, const PropertyDef&) = default;
};

enum class ContractScope { SameSubject, AnySubject };

std::string_view to_string(ContractScope scope);
std::optional<ContractScope> parse_contract_scope(std::string_view text);

/// Co-occurrence requirement: whenever `trigger` is asserted, every predicate
/// in `required` must be asserted too (for the same first argument, or
/// anywhere in the ABox for AnySubject).
struct UsageContract {
  std::string trigger;
  std::vector<std::string> required;
  ContractScope scope = ContractScope::SameSubject;
  std::string message;
  friend bool operator==(const UsageContract&, const UsageContract&) = default;
};

struct TBox {
  std::string id;
  int version = 1;
  std::vector<ClassDef> classes;
  std::vector<PropertyDef> properties;
  std::vector<Rule> rules;
  std::vector<UsageContract> usage_contracts;

  const ClassDef* find_class(std::string_view name) const;
  const PropertyDef* find_property(std::string_view name) const;
  /// True when `cls` equals `ancestor` or inherits from it. Stops on cycles.
  bool is_subclass_of(std::string_view cls, std::string_view ancestor) const;

  friend bool operator==(const TBox&, const TBox&) = default;
};

struct Individual {
  std::string name;
  std::string class_name;
  friend bool operator==(const Individual&, const Individual&) = default;
};

enum class Source { Given, Extracted, Inferred };

std::string_view to_string(Source source);
std::optional<Source> parse_source(std::string_view text);

/// Identity of a fact: predicate plus ordered arguments.
struct FactKey {
  std::string predicate;
  std::vector<Arg> args;
  friend auto operator<=>(const FactKey&, const FactKey&) = default;
  friend bool operator==(const FactKey&, const FactKey&) = default;
};

std::string to_display(const FactKey& fact);

struct Assertion {
  std::string id;
  std::string predicate;
  std::vector<Arg> args;
  Source source = Source::Given;
  double confidence = 1.0;
  std::string explanation;

  FactKey key() const { return {predicate, args}; }
  friend bool operator==(const Assertion&, const Assertion&) = default;
};

struct ABox {
  std::string tbox_id;
  std::vector<Individual> individuals;
  std::vector<Assertion> assertions;

  const Individual* find_individual(std::string_view name) const;
  const Assertion* find_assertion(std::string_view id) const;
  /// Assertions whose predicate matches, in stored order.
  std::vector<const Assertion*> with_predicate(std::string_view predicate) const;

  friend bool operator==(const ABox&, const ABox&) = default;
};

enum class Severity { Error, Warning };

struct Finding {
  Severity severity = Severity::Error;
  std::string code;
  std::string element;
  std::string message;
};

struct ValidationReport {
  std::vector<Finding> findings;

  bool is_valid() const;
  bool has(std::string_view code) const;
  std::size_t count(Severity severity) const;
  void add(Severity severity, std::string code, std::string element, std::string message);
};

/// Checks name uniqueness, class references and inheritance, property field
/// completeness, usage-contract closure, and for every rule: safety, declared
/// predicates with matching arity and argument kinds, consistent variable
/// kinds, and stratifiability.
ValidationReport validate_tbox(const TBox& tbox);

/// Typing check of a single assertion against the TBox and the individuals of
/// `abox`. Findings are appended to `report`; returns false on any Error.
bool check_assertion(const Assertion& assertion, const ABox& abox, const TBox& tbox,
                     ValidationReport& report);

/// Usage contracts evaluated over `abox`; appends USAGE_CONTRACT warnings.
void check_contracts(const ABox& abox, const std::vector<UsageContract>& contracts,
                     ValidationReport& report);

ValidationReport validate_abox(const ABox& abox, const TBox& tbox);

/// KB' = ABox ∪ A'. Deduplicates by fact key; the base assertion wins on
/// duplicates. Throws Error(TypeMismatch) if any inferred assertion is
/// ill-typed and Error(DuplicateAssertionId) on id clashes between distinct facts.
ABox merge(const ABox& base, const std::vector<Assertion>& inferred, const TBox& tbox);

}  // namespace solar
