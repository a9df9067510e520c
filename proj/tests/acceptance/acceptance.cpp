// Acceptance checks AC1..AC9. One PASS/FAIL line each; exit status 1 when any fails.
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include "generators.hpp"
#include "oracle.hpp"
#include "solar/eval.hpp"

using namespace solar;

namespace {

const std::filesystem::path kData = SOLAR_DATA_DIR;
const std::filesystem::path kFixtures = SOLAR_FIXTURE_DIR;

Decimal D(std::string_view s) { return Decimal::parse_or_throw(s); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

EvalCase read_case(const std::filesystem::path& file) {
  std::ifstream in(file);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_case(ss.str(), file.stem().string(), file);
}

const TaxScheduleSet& schedules() {
  static const TaxScheduleSet s = load_schedules(kData / "schedules/sara_schedules.json");
  return s;
}

TBox reference() { return load_tbox(kData / "reference_tbox.json"); }

Outcome golden_a() {
  EvalCase c = read_case(kData / "cases/golden/surviving_spouse_2019.pl");
  DeterministicExtractor backend;
  auto r = run_stage_two(c, reference(), schedules(), backend);
  if (!r.computation || !r.inference) return {false, "no computation: " + r.error_message};
  bool ss = false;
  for (const auto& a : r.inference->inferred)
    ss = ss || (a.predicate == "isSurvivingSpouse" && a.args == std::vector<Arg>{IndividualRef{"Alice"}});
  Decimal taxable = r.computation->taxable_income;
  Decimal liability = r.computation->liability;
  bool ok = ss && taxable == D("212422") && (liability - D("62000.42")).abs() <= D("0.01");
  return {ok, "isSurvivingSpouse(Alice)=" + std::string(ss ? "yes" : "no") + " taxable " + taxable.to_string() +
                  " liability " + liability.to_string()};
}

Outcome golden_b() {
  EvalCase c = read_case(kData / "cases/golden/jail_income_2019.pl");
  DeterministicExtractor backend;
  auto r = run_stage_two(c, reference(), schedules(), backend);
  if (!r.computation) return {false, "no computation: " + r.error_message};
  const auto& t = *r.computation;
  bool ok = t.filing.status == FilingStatus::Single && t.taxable_income == Decimal() && t.liability == Decimal();
  return {ok, "status " + std::string(to_string(t.filing.status)) + " taxable " + t.taxable_income.to_string() +
                  " liability " + t.liability.to_string()};
}

Outcome oracle_equivalence() {
  std::mt19937 rng(20240611);
  int mismatches = 0;
  int invalid = 0;
  const int kbs = 1000;
  for (int i = 0; i < kbs; ++i) {
    auto kb = solar::testing::random_kb(rng);
    if (!validate_tbox(kb.tbox).is_valid()) ++invalid;
    std::set<FactKey> got;
    for (const auto& a : infer(kb.tbox, kb.abox).inferred) got.insert(a.key());
    if (got != solar::testing::naive_closure(kb.tbox, kb.abox)) ++mismatches;
  }
  return {mismatches == 0 && invalid == 0, std::to_string(kbs) + " KBs, " + std::to_string(mismatches) +
                                               " mismatches, " + std::to_string(invalid) + " invalid"};
}

Outcome parser_round_trip() {
  std::mt19937 rng(77);
  int bad = 0;
  for (int i = 0; i < 1000; ++i) {
    Rule r = solar::testing::random_rule(rng);
    try {
      if (!same_structure(parse_rule(print_rule(r)), r)) ++bad;
    } catch (const std::exception&) {
      ++bad;
    }
  }
  int unexpected = 0;
  for (int i = 0; i < 100'000; ++i) {
    std::string text = solar::testing::random_rule_text(rng);
    try {
      parse_rule(text);
    } catch (const ParseError&) {
    } catch (...) {
      ++unexpected;
    }
  }
  return {bad == 0 && unexpected == 0, "1000 round trips, " + std::to_string(bad) + " differ; 100000 fuzz inputs, " +
                                           std::to_string(unexpected) + " unexpected exceptions"};
}

Outcome judge_taxonomy() {
  int right = 0;
  std::string detail;
  auto note = [&](std::string_view name, FailureClass got, FailureClass want) {
    if (got == want) ++right;
    detail += std::string(name) + "=" + std::string(to_string(got)) + " ";
  };

  TBox no_itemized = reference();
  std::erase_if(no_itemized.properties, [](const PropertyDef& p) { return p.name == "hasItemizedDeductionAmount"; });
  EvalCase itemized = read_case(kFixtures / "itemized_2010.pl");
  DeterministicExtractor deterministic;
  note("itemized", classify_failure(itemized, run_stage_two(itemized, no_itemized, schedules(), deterministic)).classification,
       FailureClass::OntologicalGap);

  TBox t = reference();
  EvalCase joint = read_case(kFixtures / "joint_no_link.pl");
  ReplayExtractor replay;
  replay.load_directory(kFixtures / "replay", &t);
  note("spouse_link", classify_failure(joint, run_stage_two(joint, t, schedules(), replay)).classification,
       FailureClass::UsagePatternGap);

  EvalCase widow = read_case(kFixtures / "widow/widow_2019.pl");
  InterpreterConfig seeded;
  seeded.precedence = {FilingStatus::HeadOfHousehold, FilingStatus::SurvivingSpouse, FilingStatus::MarriedJoint,
                       FilingStatus::MarriedSeparate, FilingStatus::Single};
  note("precedence", classify_failure(widow, run_stage_two(widow, t, schedules(), deterministic, seeded)).classification,
       FailureClass::ImplementationError);
  return {right == 3, std::to_string(right) + "/3 " + detail};
}

Outcome bracket_properties() {
  int discontinuities = 0;
  int boundaries = 0;
  for (const auto& [year, by_status] : schedules().brackets) {
    for (const auto& [status, table] : by_status) {
      for (std::size_t i = 1; i < table.size(); ++i) {
        ++boundaries;
        Decimal from_below = table[i - 1].base + (table[i].lower - table[i - 1].lower) * table[i - 1].rate;
        if ((from_below - table[i].base).abs() > D("0.01")) ++discontinuities;
      }
    }
  }

  int violations = 0;
  int sweeps = 0;
  for (const auto& [year, by_status] : schedules().brackets) {
    for (const auto& [status, table] : by_status) {
      ++sweeps;
      ABox a;
      a.tbox_id = "sara-reference";
      a.individuals = {{"Alice", "Taxpayer"}, {"Bob", "Person"}};
      auto add = [&](std::string p, std::vector<Arg> args) {
        a.assertions.push_back({"a" + std::to_string(a.assertions.size()), std::move(p), std::move(args), Source::Given, 1.0, ""});
      };
      Arg alice = IndividualRef{"Alice"};
      switch (status) {
        case FilingStatus::SurvivingSpouse: add("isSurvivingSpouse", {alice}); break;
        case FilingStatus::HeadOfHousehold: add("isHeadOfHousehold", {alice}); break;
        case FilingStatus::MarriedSeparate: add("isMarriedIndividual", {alice}); break;
        case FilingStatus::Single: add("isUnmarriedIndividual", {alice}); break;
        case FilingStatus::MarriedJoint:
          add("filesJointReturn", {alice});
          add("hasSpouse", {alice, IndividualRef{"Bob"}});
          break;
      }
      add("takesStandardDeduction", {alice});
      add("hasGrossIncomeAmount", {alice, Literal::decimal(Decimal())});
      Assertion& income = a.assertions.back();
      const Decimal top = table.back().lower * D("1.5") + D("50000");
      Decimal previous = D("-1");
      for (int i = 0; i < 1000; ++i) {
        Decimal gross = Decimal::from_units(top.units() / 1000 * i);
        income.args[1] = Literal::decimal(gross);
        auto c = compute_tax(a, schedules(), year);
        if (c.filing.status != status || c.liability < previous) ++violations;
        previous = c.liability;
      }
    }
  }
  return {discontinuities == 0 && violations == 0 && sweeps > 0,
          std::to_string(boundaries) + " boundaries, " + std::to_string(discontinuities) + " discontinuous; " +
              std::to_string(sweeps) + " sweeps of 1000 points, " + std::to_string(violations) + " violations"};
}

Outcome tolerance_metric() {
  bool triple = within_tolerance(D("110"), D("100")) && !within_tolerance(D("110.01"), D("100")) &&
                within_tolerance(D("0.50"), D("0"));
  std::mt19937 rng(4);
  std::uniform_int_distribution<std::int64_t> cents(1, 100'000'000);
  std::uniform_int_distribution<std::int64_t> scale(2, 500);
  int broken = 0;
  for (int i = 0; i < 100; ++i) {
    Decimal g = Decimal::from_units(cents(rng) * 10'000);
    // Half the predictions land near the gold so both outcomes are exercised.
    Decimal p = i % 2 ? Decimal::from_units(cents(rng) * 10'000)
                      : g + Decimal::from_units((static_cast<std::int64_t>(rng() % 240) - 120) * g.units() / 1000);
    Decimal k = Decimal::from_integer(scale(rng));
    if (within_tolerance(p, g) != within_tolerance(p * k, g * k)) ++broken;
  }
  return {triple && broken == 0, std::string("boundary triple ") + (triple ? "ok" : "wrong") + ", " +
                                     std::to_string(broken) + "/100 scale violations"};
}

Outcome pipeline_convergence() {
  TBox start = reference();
  start.usage_contracts.clear();
  auto training = load_dataset(kData / "cases/curated").cases;
  DeterministicExtractor backend;
  PipelineOptions options;
  options.max_iterations = 3;
  options.patches = load_patches(kData / "patches");
  auto state = run_pipeline({start}, training, schedules(), backend, options);
  bool contract = false;
  for (const auto& c : state.tbox.usage_contracts)
    contract = contract || (c.trigger == "filesJointReturn" &&
                            std::find(c.required.begin(), c.required.end(), "hasSpouse") != c.required.end());
  bool ok = state.status == PipelineStatus::Converged && state.failures.empty() && contract && state.iteration <= 3;
  return {ok, std::string(to_string(state.status)) + " after " + std::to_string(state.iteration) +
                  " iterations, contract " + (contract ? "restored" : "missing") + ", tbox v" +
                  std::to_string(state.tbox.version)};
}

Outcome curated_suite() {
  auto cases = load_dataset(kData / "cases/curated").cases;
  DeterministicExtractor backend;
  auto report = run_eval(cases, reference(), schedules(), backend);
  std::string failed;
  for (const auto& c : report.cases)
    if (!c.pass) failed += " " + c.id;
  char acc[32];
  std::snprintf(acc, sizeof acc, "%.3f", report.accuracy());
  return {report.passed() == cases.size() && !cases.empty(),
          std::to_string(report.passed()) + "/" + std::to_string(cases.size()) + " accuracy " + acc + failed};
}

}  // namespace

int main() {
  struct Criterion {
    const char* id;
    const char* name;
    std::function<Outcome()> run;
    double limit_ms;
  };
  const std::vector<Criterion> criteria{
      {"AC1", "golden surviving-spouse case", golden_a, 1000},
      {"AC2", "golden jail-income case", golden_b, 1000},
      {"AC3", "inference matches grounding oracle", oracle_equivalence, 60000},
      {"AC4", "parser round trip and fuzzing", parser_round_trip, 0},
      {"AC5", "judge taxonomy", judge_taxonomy, 0},
      {"AC6", "bracket continuity and monotonicity", bracket_properties, 0},
      {"AC7", "tolerance metric", tolerance_metric, 0},
      {"AC8", "pipeline convergence", pipeline_convergence, 0},
      {"AC9", "curated suite end to end", curated_suite, 0},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    if (c.limit_ms > 0 && ms >= c.limit_ms) {
      o.pass = false;
      o.detail += " (over the time limit)";
    }
    if (!o.pass) ++failures;
    std::printf("%s %s %s: %s [%.0f ms]\n", c.id, o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str(), ms);
  }
  return failures == 0 ? 0 : 1;
}
