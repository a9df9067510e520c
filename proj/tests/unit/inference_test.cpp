#include <gtest/gtest.h>

#include <random>

#include "generators.hpp"
#include "oracle.hpp"
#include "solar/inference.hpp"

using namespace solar;

namespace {

std::set<FactKey> keys(const InferenceResult& r) {
  std::set<FactKey> out;
  for (const auto& a : r.inferred) out.insert(a.key());
  return out;
}

TBox reference() { return load_tbox(SOLAR_DATA_DIR "/reference_tbox.json"); }

ABox widow() {
  ABox a;
  a.tbox_id = "sara-reference";
  a.individuals = {{"Alice", "Taxpayer"}, {"Bob", "Person"}, {"Charlie", "Dependent"}};
  a.assertions = {{"e1", "hasDeceasedSpouse", {IndividualRef{"Alice"}, IndividualRef{"Bob"}}, Source::Extracted, 0.9, ""},
                  {"e2", "maintainsHouseholdForDependent", {IndividualRef{"Alice"}, IndividualRef{"Charlie"}},
                   Source::Extracted, 0.8, ""},
                  {"e3", "isUnmarriedIndividual", {IndividualRef{"Alice"}}, Source::Extracted, 1.0, ""}};
  return a;
}

// Chain of `n` individuals linked by b0, closed transitively by one rule.
solar::testing::KnowledgeBase chain(int n) {
  solar::testing::KnowledgeBase kb;
  kb.tbox.id = "chain";
  kb.tbox.classes = {{"Thing", {}, ""}};
  kb.tbox.properties = {{"b0", PropertyKind::Object, "Thing", "Thing", {}, ""},
                        {"reach", PropertyKind::Object, "Thing", "Thing", {}, ""}};
  kb.tbox.rules = parse_rules("reach(X, Y) <- b0(X, Y).\nreach(X, Z) <- reach(X, Y) & b0(Y, Z).\n");
  kb.abox.tbox_id = "chain";
  for (int i = 0; i < n; ++i) kb.abox.individuals.push_back({"n" + std::to_string(i), "Thing"});
  for (int i = 0; i + 1 < n; ++i)
    kb.abox.assertions.push_back({"a" + std::to_string(i), "b0",
                                  {IndividualRef{"n" + std::to_string(i)}, IndividualRef{"n" + std::to_string(i + 1)}},
                                  Source::Given, 1.0, ""});
  return kb;
}

}  // namespace

TEST(Inference, DerivesSurvivingSpouseAndHeadOfHousehold) {
  auto r = infer(reference(), widow());
  auto k = keys(r);
  EXPECT_TRUE(k.count({"isSurvivingSpouse", {IndividualRef{"Alice"}}}));
  EXPECT_TRUE(k.count({"isHeadOfHousehold", {IndividualRef{"Alice"}}}));
  for (const auto& a : r.inferred) {
    EXPECT_EQ(a.source, Source::Inferred);
    EXPECT_DOUBLE_EQ(a.confidence, 1.0);
  }
}

TEST(Inference, MatchesNaiveOracleOnRandomKBs) {
  std::mt19937 rng(12345);
  for (int i = 0; i < 300; ++i) {
    auto kb = solar::testing::random_kb(rng);
    ASSERT_TRUE(validate_tbox(kb.tbox).is_valid()) << i;
    auto expected = solar::testing::naive_closure(kb.tbox, kb.abox);
    auto got = keys(infer(kb.tbox, kb.abox));
    ASSERT_EQ(got, expected) << "kb " << i << ": " << to_json(kb.tbox).dump();
  }
}

TEST(Inference, RecursionReachesFixpoint) {
  auto kb = chain(6);
  auto r = infer(kb.tbox, kb.abox);
  EXPECT_EQ(r.inferred.size(), 15u);
  EXPECT_EQ(keys(r), solar::testing::naive_closure(kb.tbox, kb.abox));
}

TEST(Inference, DerivationCapKeepsPartialResult) {
  auto kb = chain(8);
  try {
    infer(kb.tbox, kb.abox, {5});
    FAIL();
  } catch (const DerivationCapError& e) {
    EXPECT_EQ(e.code(), ErrorCode::DerivationCap);
    EXPECT_LE(e.partial().inferred.size(), 5u);
    EXPECT_FALSE(e.partial().inferred.empty());
  }
}

TEST(Inference, RejectsUnstratifiableRules) {
  TBox t = reference();
  Rule a = parse_rule("isMarriedIndividual(X) <- hasSpouse(X, Y) & !isUnmarriedIndividual(X).");
  Rule b = parse_rule("isUnmarriedIndividual(X) <- hasSpouse(X, Y) & !isMarriedIndividual(X).");
  a.id = "a";
  b.id = "b";
  t.rules = {a, b};
  EXPECT_THROW(infer(t, widow()), StratificationError);
}

TEST(Inference, NegationSeesLowerStratumOnly) {
  TBox t = reference();
  Rule r = parse_rule("isHeadOfHousehold(X) <- maintainsHouseholdForDependent(X, Z) & !isSurvivingSpouse(X).");
  r.id = "hoh_unless_ss";
  t.rules = {t.rules[0], r};
  auto k = keys(infer(t, widow()));
  EXPECT_TRUE(k.count({"isSurvivingSpouse", {IndividualRef{"Alice"}}}));
  EXPECT_FALSE(k.count({"isHeadOfHousehold", {IndividualRef{"Alice"}}}));
}

TEST(Inference, ExplainsWithPremisesAndBindings) {
  auto r = infer(reference(), widow());
  const Assertion* ss = nullptr;
  for (const auto& a : r.inferred)
    if (a.predicate == "isSurvivingSpouse") ss = &a;
  ASSERT_NE(ss, nullptr);
  const ProofStep* step = r.trace.step_for(ss->id);
  ASSERT_NE(step, nullptr);
  EXPECT_EQ(step->rule, "surviving_spouse");
  EXPECT_EQ(step->premises, (std::vector<std::string>{"e1", "e2"}));
  EXPECT_EQ(step->premise_confidences, (std::vector<double>{0.9, 0.8}));
  EXPECT_EQ(std::get<IndividualRef>(step->substitution.at("Z")).name, "Charlie");

  auto tree = explain(ss->id, r.trace);
  EXPECT_EQ(tree.rule_id, "surviving_spouse");
  EXPECT_EQ(tree.children.size(), 2u);
  EXPECT_EQ(tree.depth(), 1);
  EXPECT_EQ(tree.leaf_count(), 2u);
  EXPECT_NE(render(tree).find("Charlie"), std::string::npos);
  EXPECT_THROW(explain("e1", r.trace), Error);
}

TEST(Inference, NestedExplanationDepth) {
  auto kb = chain(4);
  auto r = infer(kb.tbox, kb.abox);
  const Assertion* far = nullptr;
  for (const auto& a : r.inferred)
    if (a.args == std::vector<Arg>{IndividualRef{"n0"}, IndividualRef{"n3"}}) far = &a;
  ASSERT_NE(far, nullptr);
  auto tree = explain(far->id, r.trace);
  EXPECT_EQ(tree.depth(), 3);
  EXPECT_EQ(tree.leaf_count(), 3u);
}

TEST(Inference, TraceRoundTripsThroughJson) {
  auto r = infer(reference(), widow());
  ProofTrace back = trace_from_json(to_json(r.trace));
  EXPECT_EQ(to_json(back).dump(), to_json(r.trace).dump());
  for (const auto& a : r.inferred) EXPECT_NE(back.step_for(a.id), nullptr);
}

TEST(Inference, OrdersResultsByPredicateThenArguments) {
  auto r = infer(reference(), widow());
  for (std::size_t i = 1; i < r.inferred.size(); ++i) EXPECT_LT(r.inferred[i - 1].key(), r.inferred[i].key());
}
