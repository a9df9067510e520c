#include "solar/ontology.hpp"

#include <algorithm>

namespace solar {

std::string_view to_string(PropertyKind kind) {
  switch (kind) {
    case PropertyKind::Unary: return "Unary";
    case PropertyKind::Object: return "Object";
    case PropertyKind::Datatype: return "Datatype";
  }
  return "Unary";
}

std::optional<PropertyKind> parse_property_kind(std::string_view text) {
  if (text == "Unary") return PropertyKind::Unary;
  if (text == "Object") return PropertyKind::Object;
  if (text == "Datatype") return PropertyKind::Datatype;
  return std::nullopt;
}

std::string_view to_string(ContractScope scope) {
  return scope == ContractScope::SameSubject ? "SameSubject" : "AnySubject";
}

std::optional<ContractScope> parse_contract_scope(std::string_view text) {
  if (text == "SameSubject") return ContractScope::SameSubject;
  if (text == "AnySubject") return ContractScope::AnySubject;
  return std::nullopt;
}

std::string_view to_string(Source source) {
  switch (source) {
    case Source::Given: return "Given";
    case Source::Extracted: return "Extracted";
    case Source::Inferred: return "Inferred";
  }
  return "Given";
}

std::optional<Source> parse_source(std::string_view text) {
  if (text == "Given") return Source::Given;
  if (text == "Extracted") return Source::Extracted;
  if (text == "Inferred") return Source::Inferred;
  return std::nullopt;
}

std::string to_display(const FactKey& fact) {
  std::string out = fact.predicate + "(";
  for (std::size_t i = 0; i < fact.args.size(); ++i) {
    if (i) out += ", ";
    out += to_display(fact.args[i]);
  }
  return out + ")";
}

const ClassDef* TBox::find_class(std::string_view name) const {
  for (const auto& c : classes)
    if (c.name == name) return &c;
  return nullptr;
}

const PropertyDef* TBox::find_property(std::string_view name) const {
  for (const auto& p : properties)
    if (p.name == name) return &p;
  return nullptr;
}

bool TBox::is_subclass_of(std::string_view cls, std::string_view ancestor) const {
  std::string_view current = cls;
  for (std::size_t hops = 0; hops <= classes.size(); ++hops) {
    if (current == ancestor) return true;
    const ClassDef* def = find_class(current);
    if (!def || !def->parent) return false;
    current = *def->parent;
  }
  return false;
}

const Individual* ABox::find_individual(std::string_view name) const {
  for (const auto& i : individuals)
    if (i.name == name) return &i;
  return nullptr;
}

const Assertion* ABox::find_assertion(std::string_view id) const {
  for (const auto& a : assertions)
    if (a.id == id) return &a;
  return nullptr;
}

std::vector<const Assertion*> ABox::with_predicate(std::string_view predicate) const {
  std::vector<const Assertion*> out;
  for (const auto& a : assertions)
    if (a.predicate == predicate) out.push_back(&a);
  return out;
}

bool ValidationReport::is_valid() const { return count(Severity::Error) == 0; }

bool ValidationReport::has(std::string_view code) const {
  return std::any_of(findings.begin(), findings.end(), [&](const Finding& f) { return f.code == code; });
}

std::size_t ValidationReport::count(Severity severity) const {
  return static_cast<std::size_t>(std::count_if(
      findings.begin(), findings.end(), [&](const Finding& f) { return f.severity == severity; }));
}

void ValidationReport::add(Severity severity, std::string code, std::string element, std::string message) {
  findings.push_back({severity, std::move(code), std::move(element), std::move(message)});
}

namespace {

constexpr auto kError = Severity::Error;
constexpr auto kWarning = Severity::Warning;

void check_classes(const TBox& tbox, ValidationReport& report) {
  std::set<std::string> seen;
  for (const auto& c : tbox.classes) {
    if (c.name.empty()) report.add(kError, "INVALID_NAME", "", "class with empty name");
    if (!seen.insert(c.name).second) {
      report.add(kError, "DUPLICATE_CLASS", c.name, "class declared more than once");
    }
    if (c.parent && !tbox.find_class(*c.parent)) {
      report.add(kError, "UNDECLARED_CLASS", c.name, "parent class '" + *c.parent + "' is not declared");
    }
  }
  for (const auto& c : tbox.classes) {
    std::set<std::string> chain{c.name};
    const ClassDef* cur = &c;
    while (cur->parent) {
      if (!chain.insert(*cur->parent).second) {
        report.add(kError, "CLASS_CYCLE", c.name, "parent chain of '" + c.name + "' is cyclic");
        break;
      }
      cur = tbox.find_class(*cur->parent);
      if (!cur) break;
    }
  }
}

void check_properties(const TBox& tbox, ValidationReport& report) {
  std::set<std::string> seen;
  for (const auto& p : tbox.properties) {
    if (p.name.empty()) report.add(kError, "INVALID_NAME", "", "property with empty name");
    if (!seen.insert(p.name).second) {
      report.add(kError, "DUPLICATE_PROPERTY", p.name, "property declared more than once");
    }
    if (!tbox.find_class(p.subject_class)) {
      report.add(kError, "UNDECLARED_CLASS", p.name,
                 "subject class '" + p.subject_class + "' is not declared");
    }
    const bool wants_object = p.kind == PropertyKind::Object;
    const bool wants_datatype = p.kind == PropertyKind::Datatype;
    if (wants_object != p.object_class.has_value()) {
      report.add(kError, "PROPERTY_FIELDS", p.name,
                 wants_object ? "object property lacks object_class"
                              : "object_class given for a non-object property");
    }
    if (wants_datatype != p.datatype.has_value()) {
      report.add(kError, "PROPERTY_FIELDS", p.name,
                 wants_datatype ? "datatype property lacks datatype"
                                : "datatype given for a non-datatype property");
    }
    if (p.object_class && !tbox.find_class(*p.object_class)) {
      report.add(kError, "UNDECLARED_CLASS", p.name,
                 "object class '" + *p.object_class + "' is not declared");
    }
  }
}

// Kind of value a rule variable ranges over.
struct VarKind {
  bool individual = false;
  std::set<Datatype> datatypes;
};

bool numeric(Datatype t) { return t == Datatype::Decimal || t == Datatype::Integer; }

bool compatible(Datatype a, Datatype b) { return a == b || (numeric(a) && numeric(b)); }

void check_atom(const Rule& rule, const Atom& atom, const TBox& tbox, bool binds,
                std::map<std::string, VarKind>& kinds, ValidationReport& report) {
  const std::string where = rule.id.empty() ? print_rule(rule) : rule.id;
  const PropertyDef* prop = tbox.find_property(atom.predicate);
  if (!prop) {
    report.add(kError, "UNDECLARED_PREDICATE", where, "predicate '" + atom.predicate + "' is not declared");
    return;
  }
  if (atom.terms.size() != prop->arity()) {
    report.add(kError, "ARITY_MISMATCH", where,
               atom.predicate + " expects " + std::to_string(prop->arity()) + " argument(s), got " +
                   std::to_string(atom.terms.size()));
    return;
  }
  for (std::size_t i = 0; i < atom.terms.size(); ++i) {
    const Term& t = atom.terms[i];
    const bool literal_slot = i == 1 && prop->kind == PropertyKind::Datatype;
    if (auto v = std::get_if<Variable>(&t)) {
      if (!binds) continue;
      auto& k = kinds[v->name];
      if (literal_slot && prop->datatype) {
        k.datatypes.insert(*prop->datatype);
      } else if (!literal_slot) {
        k.individual = true;
      }
    } else if (auto lit = std::get_if<Literal>(&t)) {
      if (!literal_slot) {
        report.add(kError, "ARG_KIND_MISMATCH", where,
                   atom.predicate + " argument " + std::to_string(i + 1) + " must be an individual");
      } else if (prop->datatype && !compatible(lit->type(), *prop->datatype)) {
        report.add(kError, "DATATYPE_MISMATCH", where,
                   atom.predicate + " expects " + std::string(to_string(*prop->datatype)));
      }
    } else if (literal_slot) {
      report.add(kError, "ARG_KIND_MISMATCH", where,
                 atom.predicate + " argument 2 must be a literal");
    }
  }
}

std::optional<Datatype> term_datatype(const Term& t, const std::map<std::string, VarKind>& kinds) {
  if (auto lit = std::get_if<Literal>(&t)) return lit->type();
  if (auto v = std::get_if<Variable>(&t)) {
    auto it = kinds.find(v->name);
    if (it != kinds.end() && !it->second.individual && !it->second.datatypes.empty())
      return *it->second.datatypes.begin();
  }
  return std::nullopt;
}

void check_rule(const Rule& rule, const TBox& tbox, ValidationReport& report) {
  const std::string where = rule.id.empty() ? print_rule(rule) : rule.id;
  if (rule.body.empty()) {
    report.add(kError, "EMPTY_BODY", where, "rule has an empty body");
    return;
  }
  auto vars = collect_variables(rule);
  auto report_unsafe = [&](const std::set<std::string>& s, const char* what) {
    for (const auto& v : s) {
      if (!vars.positive.count(v)) {
        report.add(kError, "UNSAFE_RULE", where,
                   std::string(what) + " variable " + v + " does not occur in a positive body atom");
      }
    }
  };
  report_unsafe(vars.head, "head");
  report_unsafe(vars.negated, "negated");
  report_unsafe(vars.compared, "compared");

  std::map<std::string, VarKind> kinds;
  for (const auto& lit : rule.body)
    if (auto a = std::get_if<Atom>(&lit)) check_atom(rule, *a, tbox, true, kinds, report);
  check_atom(rule, rule.head, tbox, false, kinds, report);
  for (const auto& lit : rule.body)
    if (auto n = std::get_if<Negation>(&lit)) check_atom(rule, n->atom, tbox, false, kinds, report);

  for (const auto& [name, kind] : kinds) {
    bool conflict = kind.individual && !kind.datatypes.empty();
    for (auto a : kind.datatypes)
      for (auto b : kind.datatypes) conflict = conflict || !compatible(a, b);
    if (conflict) {
      report.add(kError, "VARIABLE_KIND_CONFLICT", where,
                 "variable " + name + " is used both as different kinds of value");
    }
  }
  // Head and negated variables must be used consistently with the body bindings.
  auto check_use = [&](const Atom& atom) {
    const PropertyDef* prop = tbox.find_property(atom.predicate);
    if (!prop || atom.terms.size() != prop->arity()) return;
    for (std::size_t i = 0; i < atom.terms.size(); ++i) {
      auto v = std::get_if<Variable>(&atom.terms[i]);
      if (!v) continue;
      auto it = kinds.find(v->name);
      if (it == kinds.end()) continue;
      const bool literal_slot = i == 1 && prop->kind == PropertyKind::Datatype;
      bool ok = literal_slot ? (!it->second.individual && prop->datatype &&
                                std::all_of(it->second.datatypes.begin(), it->second.datatypes.end(),
                                            [&](Datatype d) { return compatible(d, *prop->datatype); }))
                             : it->second.datatypes.empty();
      if (!ok) {
        report.add(kError, "VARIABLE_KIND_CONFLICT", where,
                   "variable " + v->name + " has the wrong kind for " + atom.predicate);
      }
    }
  };
  check_use(rule.head);
  for (const auto& lit : rule.body)
    if (auto n = std::get_if<Negation>(&lit)) check_use(n->atom);

  for (const auto& lit : rule.body) {
    auto c = std::get_if<Comparison>(&lit);
    if (!c) continue;
    for (const Term* side : {&c->lhs, &c->rhs}) {
      if (std::holds_alternative<IndividualRef>(*side)) {
        report.add(kError, "COMPARISON_NOT_DATATYPE", where, "comparison operand is an individual");
      } else if (auto v = std::get_if<Variable>(side)) {
        auto it = kinds.find(v->name);
        if (it != kinds.end() && it->second.individual) {
          report.add(kError, "COMPARISON_NOT_DATATYPE", where,
                     "comparison operand " + v->name + " is bound to an individual");
        }
      }
    }
    auto lt = term_datatype(c->lhs, kinds);
    auto rt = term_datatype(c->rhs, kinds);
    if (lt && rt && !compatible(*lt, *rt)) {
      report.add(kError, "COMPARISON_TYPE_MISMATCH", where,
                 "cannot compare " + std::string(to_string(*lt)) + " with " + std::string(to_string(*rt)));
    }
  }
}

}  // namespace

ValidationReport validate_tbox(const TBox& tbox) {
  ValidationReport report;
  check_classes(tbox, report);
  check_properties(tbox, report);

  std::set<std::string> rule_ids;
  for (const auto& rule : tbox.rules) {
    if (!rule.id.empty() && !rule_ids.insert(rule.id).second) {
      report.add(kError, "DUPLICATE_RULE_ID", rule.id, "rule id used more than once");
    }
    check_rule(rule, tbox, report);
  }
  try {
    stratify(tbox.rules);
  } catch (const StratificationError& e) {
    std::string cycle;
    for (const auto& p : e.cycle()) cycle += (cycle.empty() ? "" : " -> ") + p;
    report.add(kError, "NOT_STRATIFIABLE", cycle, e.what());
  }

  for (const auto& contract : tbox.usage_contracts) {
    std::vector<std::string> names{contract.trigger};
    names.insert(names.end(), contract.required.begin(), contract.required.end());
    for (const auto& n : names) {
      if (!tbox.find_property(n)) {
        report.add(kError, "CONTRACT_UNDECLARED_PREDICATE", contract.trigger,
                   "usage contract names undeclared predicate '" + n + "'");
      }
    }
  }
  return report;
}

bool check_assertion(const Assertion& a, const ABox& abox, const TBox& tbox, ValidationReport& report) {
  const std::size_t errors_before = report.count(kError);
  const std::string where = a.id.empty() ? a.predicate : a.id;
  const PropertyDef* prop = tbox.find_property(a.predicate);
  if (!prop) {
    report.add(kError, "UNDECLARED_PREDICATE", where, "predicate '" + a.predicate + "' is not declared");
    return false;
  }
  if (a.args.size() != prop->arity()) {
    report.add(kError, "ARITY_MISMATCH", where,
               a.predicate + " expects " + std::to_string(prop->arity()) + " argument(s), got " +
                   std::to_string(a.args.size()));
    return false;
  }
  auto check_individual = [&](const Arg& arg, const std::string& cls, std::size_t pos) {
    auto ref = std::get_if<IndividualRef>(&arg);
    if (!ref) {
      report.add(kError, "ARG_KIND_MISMATCH", where,
                 a.predicate + " argument " + std::to_string(pos + 1) + " must be an individual, got " +
                     to_display(arg));
      return;
    }
    const Individual* ind = abox.find_individual(ref->name);
    if (!ind) {
      report.add(kError, "UNDECLARED_INDIVIDUAL", where, "individual '" + ref->name + "' is not declared");
      return;
    }
    if (!tbox.is_subclass_of(ind->class_name, cls)) {
      report.add(kError, "CLASS_MISMATCH", where,
                 ref->name + " (" + ind->class_name + ") is not a " + cls + " as " + a.predicate + " requires");
    }
  };
  check_individual(a.args[0], prop->subject_class, 0);
  if (prop->kind == PropertyKind::Object) {
    check_individual(a.args[1], prop->object_class.value_or(""), 1);
  } else if (prop->kind == PropertyKind::Datatype) {
    auto lit = std::get_if<Literal>(&a.args[1]);
    if (!lit) {
      report.add(kError, "ARG_KIND_MISMATCH", where, a.predicate + " argument 2 must be a literal");
    } else if (prop->datatype && lit->type() != *prop->datatype) {
      report.add(kError, "DATATYPE_MISMATCH", where,
                 a.predicate + " expects " + std::string(to_string(*prop->datatype)) + ", got " +
                     std::string(to_string(lit->type())));
    }
  }
  return report.count(kError) == errors_before;
}

void check_contracts(const ABox& abox, const std::vector<UsageContract>& contracts,
                     ValidationReport& report) {
  for (const auto& contract : contracts) {
    for (const auto& a : abox.assertions) {
      if (a.predicate != contract.trigger) continue;
      for (const auto& required : contract.required) {
        bool satisfied = std::any_of(abox.assertions.begin(), abox.assertions.end(), [&](const Assertion& b) {
          if (b.predicate != required) return false;
          if (contract.scope == ContractScope::AnySubject) return true;
          return !a.args.empty() && !b.args.empty() && b.args[0] == a.args[0];
        });
        if (satisfied) continue;
        std::string subject = a.args.empty() ? "" : to_display(a.args[0]);
        report.add(kWarning, "USAGE_CONTRACT", required,
                   to_display(a.key()) + " requires " + required +
                       (contract.scope == ContractScope::SameSubject ? "(" + subject + ", ...)" : "") +
                       (contract.message.empty() ? "" : ": " + contract.message));
      }
    }
  }
}

ValidationReport validate_abox(const ABox& abox, const TBox& tbox) {
  ValidationReport report;
  if (!abox.tbox_id.empty() && !tbox.id.empty() && abox.tbox_id != tbox.id) {
    report.add(kWarning, "TBOX_MISMATCH", abox.tbox_id, "ABox was built for TBox '" + abox.tbox_id + "'");
  }
  std::set<std::string> names;
  for (const auto& ind : abox.individuals) {
    if (!names.insert(ind.name).second) {
      report.add(kError, "DUPLICATE_INDIVIDUAL", ind.name, "individual declared more than once");
    }
    if (!tbox.find_class(ind.class_name)) {
      report.add(kError, "UNDECLARED_CLASS", ind.name, "class '" + ind.class_name + "' is not declared");
    }
  }
  std::set<std::string> ids;
  for (const auto& a : abox.assertions) {
    if (!ids.insert(a.id).second) {
      report.add(kError, "DUPLICATE_ASSERTION_ID", a.id, "assertion id used more than once");
    }
    if (!(a.confidence >= 0.0 && a.confidence <= 1.0)) {
      report.add(kError, "CONFIDENCE_RANGE", a.id, "confidence must lie in [0, 1]");
    }
    if (a.source == Source::Inferred && a.confidence != 1.0) {
      report.add(kError, "INFERRED_CONFIDENCE", a.id, "inferred assertions carry confidence 1.0");
    }
    check_assertion(a, abox, tbox, report);
  }
  check_contracts(abox, tbox.usage_contracts, report);
  return report;
}

ABox merge(const ABox& base, const std::vector<Assertion>& inferred, const TBox& tbox) {
  for (const auto& a : inferred) {
    ValidationReport r;
    if (!check_assertion(a, base, tbox, r)) {
      throw Error(ErrorCode::TypeMismatch,
                  "inferred assertion " + to_display(a.key()) + " is ill-typed: " + r.findings.front().message);
    }
  }
  ABox out = base;
  std::map<FactKey, std::string> facts;
  std::set<std::string> ids;
  for (const auto& a : base.assertions) {
    facts.emplace(a.key(), a.id);
    ids.insert(a.id);
  }
  for (const auto& a : inferred) {
    if (facts.count(a.key())) continue;
    if (!ids.insert(a.id).second) {
      throw Error(ErrorCode::DuplicateAssertionId, "assertion id '" + a.id + "' already names another fact");
    }
    facts.emplace(a.key(), a.id);
    out.assertions.push_back(a);
  }
  return out;
}

}  // namespace solar
