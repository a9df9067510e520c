#include <gtest/gtest.h>

#include <random>

#include "solar/tax.hpp"

using namespace solar;

namespace {

Decimal D(std::string_view s) { return Decimal::parse_or_throw(s); }

const TaxScheduleSet& schedules() {
  static const TaxScheduleSet s = load_schedules(SOLAR_DATA_DIR "/schedules/sara_schedules.json");
  return s;
}

// Marginal-rate sum, written independently of the base column.
Decimal marginal_tax(Decimal x, const BracketTable& t) {
  Decimal total;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (x <= t[i].lower) break;
    Decimal top = i + 1 < t.size() ? std::min(x, t[i + 1].lower) : x;
    total += (top - t[i].lower) * t[i].rate;
  }
  return total;
}

class Builder {
 public:
  Builder() { abox_.tbox_id = "sara-reference"; }
  Builder& person(std::string name, std::string cls = "Taxpayer") {
    abox_.individuals.push_back({std::move(name), std::move(cls)});
    return *this;
  }
  Builder& fact(std::string predicate, std::vector<Arg> args) {
    abox_.assertions.push_back(
        {"a" + std::to_string(abox_.assertions.size() + 1), std::move(predicate), std::move(args), Source::Given, 1.0, ""});
    return *this;
  }
  Builder& status(std::string who, FilingStatus s) {
    switch (s) {
      case FilingStatus::SurvivingSpouse: return fact("isSurvivingSpouse", {IndividualRef{who}});
      case FilingStatus::HeadOfHousehold: return fact("isHeadOfHousehold", {IndividualRef{who}});
      case FilingStatus::MarriedSeparate: return fact("isMarriedIndividual", {IndividualRef{who}});
      case FilingStatus::Single: return fact("isUnmarriedIndividual", {IndividualRef{who}});
      case FilingStatus::MarriedJoint:
        person("Spouse", "Person");
        fact("filesJointReturn", {IndividualRef{who}});
        return fact("hasSpouse", {IndividualRef{who}, IndividualRef{"Spouse"}});
    }
    return *this;
  }
  Builder& income(std::string who, Decimal amount) {
    return fact("hasGrossIncomeAmount", {IndividualRef{std::move(who)}, Literal::decimal(amount)});
  }
  Builder& standard(std::string who) { return fact("takesStandardDeduction", {IndividualRef{std::move(who)}}); }
  ABox build() const { return abox_; }

 private:
  ABox abox_;
};

const std::vector<FilingStatus> kStatuses{FilingStatus::SurvivingSpouse, FilingStatus::HeadOfHousehold,
                                          FilingStatus::MarriedJoint, FilingStatus::MarriedSeparate,
                                          FilingStatus::Single};

ABox earner(FilingStatus s, Decimal gross) {
  return Builder().person("Alice").status("Alice", s).income("Alice", gross).standard("Alice").build();
}

}  // namespace

TEST(Brackets, SurvivingSpouseGoldenValue) {
  ABox a = Builder()
               .person("Alice")
               .person("Charlie", "Dependent")
               .status("Alice", FilingStatus::SurvivingSpouse)
               .income("Alice", D("236422"))
               .standard("Alice")
               .build();
  auto c = compute_tax(a, schedules(), 2019);
  EXPECT_EQ(c.filing.status, FilingStatus::SurvivingSpouse);
  EXPECT_EQ(c.taxable_income, D("212422"));
  EXPECT_EQ(c.liability, D("62000.42"));
}

TEST(Brackets, MatchesMarginalRateSum) {
  std::mt19937 rng(5);
  std::uniform_int_distribution<std::int64_t> cents(0, 60'000'000);
  for (const auto& [year, by_status] : schedules().brackets) {
    for (const auto& [status, table] : by_status) {
      for (int i = 0; i < 50; ++i) {
        Decimal x = Decimal::from_units(cents(rng) * 10'000);
        Decimal diff = (apply_brackets(x, table) - marginal_tax(x, table)).abs();
        ASSERT_LE(diff, D("0.01")) << year << " " << to_string(status) << " " << x.to_string();
      }
    }
  }
}

TEST(Brackets, ContinuousAtEveryBoundary) {
  for (const auto& [year, by_status] : schedules().brackets) {
    for (const auto& [status, table] : by_status) {
      ASSERT_TRUE(check_table(table).empty());
      for (std::size_t i = 1; i < table.size(); ++i) {
        const Bracket& prev = table[i - 1];
        Decimal from_below = prev.base + (table[i].lower - prev.lower) * prev.rate;
        EXPECT_LE((from_below - table[i].base).abs(), D("0.01")) << year << " " << to_string(status) << " " << i;
      }
    }
  }
}

TEST(Brackets, BoundaryBelongsToUpperBracket) {
  BracketTable t{{D("0"), D("0.1"), D("0")}, {D("100"), D("0.2"), D("10")}};
  EXPECT_EQ(evaluate_brackets(D("100"), t).index, 1u);
  EXPECT_EQ(evaluate_brackets(D("99.99"), t).index, 0u);
  EXPECT_EQ(apply_brackets(D("150"), t), D("20"));
  EXPECT_EQ(apply_brackets(D("0"), t), D("0"));
}

TEST(Brackets, TableChecks) {
  EXPECT_FALSE(check_table({{D("10"), D("0.1"), D("0")}}).empty());
  EXPECT_FALSE(check_table({{D("0"), D("0.1"), D("0")}, {D("0"), D("0.2"), D("0")}}).empty());
  EXPECT_FALSE(check_table({{D("0"), D("1.5"), D("0")}}).empty());
  EXPECT_FALSE(check_table({{D("0"), D("0.1"), D("-1")}}).empty());
  EXPECT_FALSE(check_table({}).empty());
  Json bad = to_json(schedules());
  bad["brackets"]["2019"]["Single"][0]["lower"] = "5.00";
  try {
    schedules_from_json(bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MalformedDocument);
  }
}

TEST(ComputeTax, MonotoneInIncome) {
  for (const auto& [year, by_status] : schedules().brackets) {
    for (FilingStatus s : kStatuses) {
      Decimal previous = D("-1");
      for (int i = 0; i < 200; ++i) {
        Decimal gross = Decimal::from_integer(i * 2'500);
        Decimal tax = compute_tax(earner(s, gross), schedules(), year).liability;
        ASSERT_GE(tax, previous) << year << " " << to_string(s) << " " << gross.to_string();
        previous = tax;
      }
    }
  }
}

TEST(ComputeTax, LogRecomputesTheAnswer) {
  std::mt19937 rng(11);
  for (int i = 0; i < 100; ++i) {
    FilingStatus s = kStatuses[rng() % kStatuses.size()];
    int year = 2000 + static_cast<int>(rng() % 31);
    Decimal gross = Decimal::from_units(static_cast<std::int64_t>(rng() % 500'000'000) * 1000);
    auto c = compute_tax(earner(s, gross), schedules(), year);
    const LogStep* taxable = c.log.find("taxable_income");
    const LogStep* bracket = c.log.find("bracket_tax");
    const LogStep* total = c.log.find("total_tax");
    ASSERT_TRUE(taxable && bracket && total && c.log.find("standard_deduction") && c.log.find("exemptions"));
    Decimal t = taxable->inputs[0] - taxable->inputs[1] - taxable->inputs[2];
    if (t.is_negative()) t = Decimal();
    EXPECT_EQ(t, taxable->output);
    EXPECT_EQ(bracket->inputs[0], taxable->output);
    EXPECT_EQ(bracket->inputs[3] + (bracket->inputs[0] - bracket->inputs[1]) * bracket->inputs[2], bracket->output);
    EXPECT_EQ(total->output, bracket->output.round_cents());
    EXPECT_EQ(total->output, c.liability);
    ASSERT_EQ(bracket->provenance.size(), 1u);
    EXPECT_EQ(bracket->provenance[0].rfind("brackets[" + std::to_string(year) + "][" + std::string(to_string(s)), 0), 0u);
  }
}

TEST(ComputeTax, FlatScheduleSwapChangesResultWithoutCodeChanges) {
  Json j = Json::parse(R"({
    "brackets": {"2019": {"Single": [{"lower": "0", "rate": "0.10", "base": "0"}]}},
    "standard_deduction": {"2019": {"Single": "1000"}},
    "exemption": {"2019": "0"}})");
  auto flat = schedules_from_json(j);
  auto c = compute_tax(earner(FilingStatus::Single, D("50000")), flat, 2019);
  EXPECT_EQ(c.liability, D("4900"));
}

TEST(ComputeTax, ItemizedAndExemptions) {
  ABox a = Builder()
               .person("Alice")
               .person("Kid", "Dependent")
               .status("Alice", FilingStatus::Single)
               .income("Alice", D("33408"))
               .fact("hasItemizedDeductionAmount", {IndividualRef{"Alice"}, Literal::decimal(D("680"))})
               .fact("hasItemizedDeductionAmount", {IndividualRef{"Alice"}, Literal::decimal(D("2102"))})
               .fact("claimsDependent", {IndividualRef{"Alice"}, IndividualRef{"Kid"}})
               .fact("claimsDependent", {IndividualRef{"Alice"}, IndividualRef{"Kid"}})
               .build();
  auto c = compute_tax(a, schedules(), 2010);
  EXPECT_EQ(c.deduction, D("2782"));
  EXPECT_EQ(c.exemptions, D("4000"));  // self plus one dependent; the repeated claim counts once
  ASSERT_NE(c.log.find("itemized_deduction"), nullptr);
}

TEST(ComputeTax, JointReturnCombinesSpouseIncome) {
  ABox a = Builder()
               .person("Alice")
               .status("Alice", FilingStatus::MarriedJoint)
               .income("Alice", D("80000"))
               .income("Spouse", D("50000"))
               .standard("Alice")
               .build();
  auto c = compute_tax(a, schedules(), 2018);
  EXPECT_EQ(c.gross_income, D("130000"));
  EXPECT_EQ(c.liability, D("25388.50"));
}

TEST(FilingStatus, PrecedenceDecides) {
  ABox a = Builder()
               .person("Alice")
               .status("Alice", FilingStatus::SurvivingSpouse)
               .status("Alice", FilingStatus::HeadOfHousehold)
               .income("Alice", D("60000"))
               .standard("Alice")
               .build();
  EXPECT_EQ(determine_filing_status(a).status, FilingStatus::SurvivingSpouse);
  InterpreterConfig hoh_first;
  hoh_first.precedence = {FilingStatus::HeadOfHousehold, FilingStatus::SurvivingSpouse};
  auto d = determine_filing_status(a, hoh_first);
  EXPECT_EQ(d.status, FilingStatus::HeadOfHousehold);
  EXPECT_EQ(d.basis.size(), 1u);
  EXPECT_EQ(compute_tax(a, schedules(), 2019).liability, D("5400"));
}

TEST(FilingStatus, JointNeedsSpouseLink) {
  ABox a = Builder().person("Alice").fact("filesJointReturn", {IndividualRef{"Alice"}}).income("Alice", D("1")).build();
  EXPECT_EQ(determine_filing_status(a).status, FilingStatus::Single);
}

TEST(FilingStatus, FallbackRestsOnSubjectAssertions) {
  ABox a = Builder().person("Alice").income("Alice", D("100")).standard("Alice").build();
  auto d = determine_filing_status(a);
  EXPECT_EQ(d.status, FilingStatus::Single);
  EXPECT_EQ(d.basis.size(), 2u);
}

TEST(Subject, ErrorsAndDesignation) {
  ABox none = Builder().person("Alice").build();
  try {
    compute_tax(none, schedules(), 2019);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoIncomeAssertions);
  }
  ABox two = Builder().person("Alice").person("Bob").income("Alice", D("1")).income("Bob", D("2")).build();
  try {
    select_subject(two);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MultipleTaxpayersAmbiguous);
  }
  EXPECT_EQ(select_subject(two, std::string("Bob")), "Bob");
  InterpreterConfig bob;
  bob.subject = "Bob";
  EXPECT_EQ(compute_tax(two, schedules(), 2019, bob).gross_income, D("2"));
}

TEST(Subject, MissingYearIsReported) {
  try {
    compute_tax(earner(FilingStatus::Single, D("100")), schedules(), 1990);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingSchedule);
  }
}

TEST(Schedules, JsonRoundTrip) {
  auto back = schedules_from_json(to_json(schedules()));
  EXPECT_EQ(to_json(back).dump(), to_json(schedules()).dump());
  EXPECT_EQ(interpreter_requirements().size(), 1u);
}
