#pragma once

#include <random>
#include <string>

#include "solar/ontology.hpp"
#include "solar/rule.hpp"

namespace solar::testing {

struct KnowledgeBase {
  TBox tbox;
  ABox abox;
};

struct KbShape {
  int max_individuals = 6;
  int max_rules = 8;
  /// Predicates are layered 0..max_strata-1; negation only points downwards.
  int max_strata = 3;
};

/// Random stratified KB over unary, object and integer-valued predicates.
/// Rules are safe and validate; bodies mix joins, negation, constants and
/// numeric comparisons.
KnowledgeBase random_kb(std::mt19937& rng, const KbShape& shape = {});

/// Safe rule drawn from the full surface syntax: every literal type, quoted
/// constants with escapes, negation and every comparison operator.
Rule random_rule(std::mt19937& rng);

/// Mostly rule-shaped noise for fuzzing the parser.
std::string random_rule_text(std::mt19937& rng);

}  // namespace solar::testing
