#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "solar/error.hpp"
#include "solar/literal.hpp"

namespace solar {

struct Variable {
  std::string name;
  friend auto operator<=>(const Variable&, const Variable&) = default;
};

using Term = std::variant<Variable, IndividualRef, Literal>;

struct Atom {
  std::string predicate;
  std::vector<Term> terms;
  friend bool operator==(const Atom&, const Atom&) = default;
};

enum class CompareOp { Eq, Ne, Lt, Le, Gt, Ge };

std::string_view to_string(CompareOp op);

struct Comparison {
  Term lhs;
  CompareOp op = CompareOp::Eq;
  Term rhs;
  friend bool operator==(const Comparison&, const Comparison&) = default;
};

struct Negation {
  Atom atom;
  friend bool operator==(const Negation&, const Negation&) = default;
};

/// Positive atom, negated atom (negation as failure), or comparison.
using BodyLiteral = std::variant<Atom, Negation, Comparison>;

struct Rule {
  std::string id;
  Atom head;
  std::vector<BodyLiteral> body;
  std::string description;

  friend bool operator==(const Rule&, const Rule&) = default;
};

/// Equality of the logical content (head and body), ignoring id and description.
bool same_structure(const Rule& a, const Rule& b);

/// Variables of the rule, split by where they occur.
struct RuleVariables {
  std::set<std::string> head;
  std::set<std::string> positive;  ///< bound by positive body atoms
  std::set<std::string> negated;
  std::set<std::string> compared;
  std::set<std::string> all() const;
};

RuleVariables collect_variables(const Rule& rule);

/// Every head, negated and compared variable occurs in a positive body atom.
bool is_safe(const Rule& rule);

class ParseError : public Error {
 public:
  ParseError(ErrorCode code, int line, int column, std::vector<std::string> expected,
             const std::string& message);

  int line() const { return line_; }
  int column() const { return column_; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  int line_;
  int column_;
  std::vector<std::string> expected_;
};

/// Grammar:
///
///     rule    := atom "<-" literal ("&" literal)* "."
///     literal := "!" atom | atom | term op term
///     atom    := ident "(" [term ("," term)*] ")"
///     term    := Variable | constant | 'Quoted Constant' | number | date
///              | "text" | true | false
///     op      := "==" | "!=" | "<" | "<=" | ">" | ">="
///
/// Variables start with an uppercase letter or underscore; bare constants
/// start lowercase. `#` starts a comment running to end of line.
///
/// Throws ParseError (ParseError or EmptyBody) with a 1-based position.
Rule parse_rule(std::string_view text);

/// Parses a rule file: any number of rules, `#` comments. Rules are given ids
/// `<id_prefix>1`, `<id_prefix>2`, ... in file order.
std::vector<Rule> parse_rules(std::string_view text, std::string_view id_prefix = "r");

std::string print_term(const Term& term);
std::string print_atom(const Atom& atom);
std::string print_literal(const BodyLiteral& literal);
/// Canonical single-line form, e.g. `a(X) <- b(X, Y) & !c(X) & Y >= 65.`
std::string print_rule(const Rule& rule);

class StratificationError : public Error {
 public:
  explicit StratificationError(std::vector<std::string> cycle);
  /// Predicates along a dependency cycle that passes through negation; the
  /// first predicate is repeated at the end.
  const std::vector<std::string>& cycle() const { return cycle_; }

 private:
  std::vector<std::string> cycle_;
};

struct Stratification {
  /// Predicates grouped by stratum, lowest first; names sorted within a stratum.
  std::vector<std::vector<std::string>> strata;
  std::map<std::string, int> level;

  int level_of(const std::string& predicate) const;
};

/// Assigns every predicate mentioned by the rules the lowest stratum such that
/// positive dependencies point to the same or lower strata and negative ones
/// strictly lower. Throws StratificationError on a cycle through negation.
Stratification stratify(const std::vector<Rule>& rules);

}  // namespace solar
