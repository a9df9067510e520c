#include <gtest/gtest.h>

#include "solar/serialization.hpp"

using namespace solar;

namespace {

TBox reference() { return load_tbox(SOLAR_DATA_DIR "/reference_tbox.json"); }

Rule rule(std::string id, std::string_view text) {
  Rule r = parse_rule(text);
  r.id = std::move(id);
  return r;
}

Assertion fact(std::string id, std::string predicate, std::vector<Arg> args) {
  return {std::move(id), std::move(predicate), std::move(args), Source::Given, 1.0, ""};
}

Arg ind(std::string name) { return IndividualRef{std::move(name)}; }
Arg money(std::string_view v) { return Literal::decimal(Decimal::parse_or_throw(v)); }

ABox household() {
  ABox a;
  a.tbox_id = "sara-reference";
  a.individuals = {{"Alice", "Taxpayer"}, {"Bob", "Person"}, {"Charlie", "Dependent"}};
  a.assertions = {fact("e1", "hasDeceasedSpouse", {ind("Alice"), ind("Bob")}),
                  fact("e2", "maintainsHouseholdForDependent", {ind("Alice"), ind("Charlie")}),
                  fact("e3", "hasGrossIncomeAmount", {ind("Alice"), money("236422")})};
  return a;
}

}  // namespace

TEST(TBoxValidation, ReferenceIsValid) {
  auto report = validate_tbox(reference());
  EXPECT_TRUE(report.is_valid());
  EXPECT_EQ(report.count(Severity::Error), 0u);
}

TEST(TBoxValidation, ClassProblems) {
  TBox t = reference();
  t.classes.push_back({"Person", {}, ""});
  t.classes.push_back({"Orphan", "Nowhere", ""});
  t.classes.push_back({"A", "B", ""});
  t.classes.push_back({"B", "A", ""});
  auto report = validate_tbox(t);
  EXPECT_TRUE(report.has("DUPLICATE_CLASS"));
  EXPECT_TRUE(report.has("UNDECLARED_CLASS"));
  EXPECT_TRUE(report.has("CLASS_CYCLE"));
}

TEST(TBoxValidation, PropertyProblems) {
  TBox t = reference();
  t.properties.push_back({"hasSpouse", PropertyKind::Unary, "Person", {}, {}, ""});
  t.properties.push_back({"ownsCar", PropertyKind::Object, "Person", {}, {}, ""});
  t.properties.push_back({"livesIn", PropertyKind::Unary, "Place", {}, {}, ""});
  auto report = validate_tbox(t);
  EXPECT_TRUE(report.has("DUPLICATE_PROPERTY"));
  EXPECT_TRUE(report.has("PROPERTY_FIELDS"));
  EXPECT_TRUE(report.has("UNDECLARED_CLASS"));
}

TEST(TBoxValidation, RuleProblems) {
  struct Case {
    const char* text;
    const char* code;
  };
  for (const Case& c : {Case{"isMarriedIndividual(X) <- hasSpouse(X, Y) & !isSurvivingSpouse(Z).", "UNSAFE_RULE"},
                        Case{"isMarriedIndividual(X) <- weddedTo(X, Y).", "UNDECLARED_PREDICATE"},
                        Case{"isMarriedIndividual(X) <- hasSpouse(X).", "ARITY_MISMATCH"},
                        Case{"isMarriedIndividual(X) <- hasAgeYears(X, Y) & hasSpouse(X, Y).", "VARIABLE_KIND_CONFLICT"},
                        Case{"isMarriedIndividual(X) <- hasSpouse(X, Y) & Y > 3.", "COMPARISON_NOT_DATATYPE"},
                        Case{"isMarriedIndividual(X) <- hasAgeYears(X, A) & A > 2019-01-01.", "COMPARISON_TYPE_MISMATCH"},
                        Case{"isMarriedIndividual(X) <- hasAgeYears(X, \"old\").", "DATATYPE_MISMATCH"}}) {
    TBox t = reference();
    t.rules.push_back(rule("extra", c.text));
    EXPECT_TRUE(validate_tbox(t).has(c.code)) << c.text;
  }
}

TEST(TBoxValidation, NegativeCycleAndDuplicateIds) {
  TBox t = reference();
  t.rules.push_back(rule("p", "isMarriedIndividual(X) <- hasSpouse(X, Y) & !isUnmarriedIndividual(X)."));
  t.rules.push_back(rule("p", "isUnmarriedIndividual(X) <- hasSpouse(X, Y) & !isMarriedIndividual(X)."));
  auto report = validate_tbox(t);
  EXPECT_TRUE(report.has("NOT_STRATIFIABLE"));
  EXPECT_TRUE(report.has("DUPLICATE_RULE_ID"));
}

TEST(TBoxValidation, ContractsMustNameDeclaredPredicates) {
  TBox t = reference();
  t.usage_contracts.push_back({"filesJointReturn", {"hasMarriageDate"}, ContractScope::SameSubject, ""});
  EXPECT_TRUE(validate_tbox(t).has("CONTRACT_UNDECLARED_PREDICATE"));
}

TEST(ABoxValidation, CleanABoxPasses) {
  EXPECT_TRUE(validate_abox(household(), reference()).is_valid());
}

TEST(ABoxValidation, TypingProblems) {
  TBox t = reference();
  struct Case {
    Assertion a;
    const char* code;
  };
  for (const Case& c : {
           Case{fact("x", "hasSpouse", {ind("Alice"), ind("Nobody")}), "UNDECLARED_INDIVIDUAL"},
           Case{fact("x", "claimsDependent", {ind("Alice"), ind("Bob")}), "CLASS_MISMATCH"},
           Case{fact("x", "hasGrossIncomeAmount", {ind("Alice"), Literal::text("lots")}), "DATATYPE_MISMATCH"},
           Case{fact("x", "hasSpouse", {ind("Alice")}), "ARITY_MISMATCH"},
           Case{fact("x", "isRich", {ind("Alice")}), "UNDECLARED_PREDICATE"},
           Case{fact("e1", "isMarriedIndividual", {ind("Bob")}), "DUPLICATE_ASSERTION_ID"},
       }) {
    ABox a = household();
    a.assertions.push_back(c.a);
    auto report = validate_abox(a, t);
    EXPECT_TRUE(report.has(c.code)) << c.code;
    EXPECT_FALSE(report.is_valid());
  }
  ABox a = household();
  a.assertions[0].confidence = 1.5;
  EXPECT_TRUE(validate_abox(a, t).has("CONFIDENCE_RANGE"));
  a = household();
  a.tbox_id = "other";
  EXPECT_TRUE(validate_abox(a, t).has("TBOX_MISMATCH"));
  a = household();
  a.individuals.push_back({"Dana", "Alien"});
  EXPECT_TRUE(validate_abox(a, t).has("UNDECLARED_CLASS"));
}

TEST(ABoxValidation, IntegerIsWidenedOnLoadNotInValidation) {
  ABox a = household();
  a.assertions.push_back(fact("x", "hasGrossIncomeAmount", {ind("Bob"), Literal::integer(500)}));
  EXPECT_TRUE(validate_abox(a, reference()).has("DATATYPE_MISMATCH"));
  TBox t = reference();
  ABox loaded = abox_from_json(to_json(a), &t);
  EXPECT_TRUE(validate_abox(loaded, t).is_valid());
  EXPECT_EQ(loaded.assertions.back().args[1], money("500"));
}

TEST(ABoxValidation, UsageContractIsAWarning) {
  ABox a = household();
  a.assertions.push_back(fact("j", "filesJointReturn", {ind("Alice")}));
  auto report = validate_abox(a, reference());
  EXPECT_TRUE(report.has("USAGE_CONTRACT"));
  EXPECT_TRUE(report.is_valid());
  EXPECT_EQ(report.count(Severity::Warning), 1u);
}

TEST(Merge, DeduplicatesByFactAndKeepsBase) {
  ABox base = household();
  Assertion dup = fact("i1", "hasDeceasedSpouse", {ind("Alice"), ind("Bob")});
  dup.source = Source::Inferred;
  Assertion fresh = fact("i2", "isSurvivingSpouse", {ind("Alice")});
  fresh.source = Source::Inferred;
  ABox merged = merge(base, {dup, fresh}, reference());
  ASSERT_EQ(merged.assertions.size(), 4u);
  EXPECT_EQ(merged.assertions[0].source, Source::Given);
  EXPECT_EQ(merged.assertions.back().predicate, "isSurvivingSpouse");
}

TEST(Merge, RejectsIllTypedAndClashingIds) {
  Assertion bad = fact("i1", "hasGrossIncomeAmount", {ind("Alice"), Literal::text("x")});
  try {
    merge(household(), {bad}, reference());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TypeMismatch);
  }
  Assertion clash = fact("e1", "isSurvivingSpouse", {ind("Alice")});
  try {
    merge(household(), {clash}, reference());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DuplicateAssertionId);
  }
}

TEST(TBox, SubclassWalk) {
  TBox t = reference();
  EXPECT_TRUE(t.is_subclass_of("SurvivingSpouse", "Person"));
  EXPECT_FALSE(t.is_subclass_of("Dependent", "Taxpayer"));
}
