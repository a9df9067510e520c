#include <gtest/gtest.h>

#include <fstream>
#include <random>

#include "solar/eval.hpp"

using namespace solar;

namespace {

const std::filesystem::path kData = SOLAR_DATA_DIR;

Decimal D(std::string_view s) { return Decimal::parse_or_throw(s); }

class TempDir {
 public:
  TempDir() : path_(std::filesystem::temp_directory_path() / ("solar_cases_" + std::to_string(std::random_device{}()))) {
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  void write(const std::string& name, const std::string& content) const { std::ofstream(path_ / name) << content; }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

const char* kGood = "% Text\n% Bob was paid $10,000 in 2017.\n\n% Question\n% How much tax does Bob have to pay in 2017? $450\n";

}  // namespace

TEST(Dataset, ParsesCaseLayout) {
  EvalCase c = parse_case(
      "% Text\n% Alice was paid $1200 in 2019.\n% She has no other income.\n\n% Question\n"
      "% How much tax does Alice have to pay in 2019? $1,234.50\n",
      "x");
  EXPECT_EQ(c.text.narrative, "Alice was paid $1200 in 2019. She has no other income.");
  EXPECT_EQ(c.gold, D("1234.50"));
  EXPECT_EQ(c.tax_year, 2019);
  EXPECT_EQ(c.text.tax_year, 2019);
}

TEST(Dataset, LoadsSortedAndSkipsEntailmentCases) {
  TempDir dir;
  dir.write("b.pl", kGood);
  dir.write("a.pl", kGood);
  dir.write("notes.md", "ignored");
  dir.write("c.pl", "% Text\n% Bob is a person.\n\n% Question\n% Bob is married. Entailment\n");
  EXPECT_THROW(load_dataset(dir.path()), MalformedCaseError);
  Dataset d = load_dataset(dir.path(), {true});
  ASSERT_EQ(d.cases.size(), 2u);
  EXPECT_EQ(d.cases[0].id, "a");
  EXPECT_EQ(d.skipped.size(), 1u);
}

TEST(Dataset, ReportsEveryMalformedFile) {
  TempDir dir;
  dir.write("ok.pl", kGood);
  dir.write("no_question.pl", "% Text\n% Bob was paid $5.\n");
  dir.write("no_text.pl", "% Question\n% How much tax does Bob have to pay in 2017? $4\n");
  dir.write("bad_answer.pl", "% Text\n% Bob was paid $5.\n% Question\n% How much tax does Bob have to pay in 2017? $4,0,0\n");
  try {
    load_dataset(dir.path());
    FAIL();
  } catch (const MalformedCaseError& e) {
    EXPECT_EQ(e.code(), ErrorCode::MalformedCase);
    EXPECT_EQ(e.problems().size(), 3u);
  }
  EXPECT_THROW(load_dataset(dir.path() / "missing"), Error);
}

TEST(Tolerance, BoundaryTriple) {
  EXPECT_TRUE(within_tolerance(D("110"), D("100")));
  EXPECT_FALSE(within_tolerance(D("110.01"), D("100")));
  EXPECT_TRUE(within_tolerance(D("0.50"), D("0")));
  EXPECT_FALSE(within_tolerance(D("0.51"), D("0")));
  EXPECT_TRUE(within_tolerance(D("90"), D("100")));
  EXPECT_FALSE(within_tolerance(D("89.99"), D("100")));
  EXPECT_TRUE(within_tolerance(D("-105"), D("-100")));
}

TEST(Tolerance, ScaleInvariant) {
  std::mt19937 rng(3);
  std::uniform_int_distribution<std::int64_t> cents(1, 10'000'000);
  std::uniform_int_distribution<std::int64_t> factor(1, 1000);
  for (int i = 0; i < 1000; ++i) {
    Decimal g = Decimal::from_units(cents(rng) * 10'000);
    Decimal p = Decimal::from_units(cents(rng) * 10'000);
    Decimal k = Decimal::from_integer(factor(rng));
    EXPECT_EQ(within_tolerance(p, g), within_tolerance(p * k, g * k)) << p.to_string() << " " << g.to_string();
  }
}

TEST(Eval, CuratedSuiteIsExact) {
  auto cases = load_dataset(kData / "cases/curated").cases;
  auto schedules = load_schedules(kData / "schedules/sara_schedules.json");
  DeterministicExtractor backend;
  auto report = run_eval(cases, load_tbox(kData / "reference_tbox.json"), schedules, backend);
  EXPECT_EQ(report.passed(), cases.size());
  for (const auto& c : report.cases) EXPECT_EQ(c.predicted, c.gold) << c.id;
  EXPECT_DOUBLE_EQ(report.accuracy(), 1.0);
}

TEST(Eval, EmptyTBoxFailsEveryCaseAsOntologicalGap) {
  auto cases = load_dataset(kData / "cases/curated").cases;
  auto schedules = load_schedules(kData / "schedules/sara_schedules.json");
  TBox empty;
  empty.id = "sara-reference";
  DeterministicExtractor backend;
  auto report = run_eval(cases, empty, schedules, backend);
  EXPECT_EQ(report.passed(), 0u);
  for (const auto& c : report.cases) {
    ASSERT_TRUE(c.failure) << c.id;
    EXPECT_EQ(c.failure->classification, FailureClass::OntologicalGap) << c.id;
  }
}

TEST(Eval, ReportIsIndependentOfThreadCount) {
  auto cases = load_dataset(kData / "cases/curated").cases;
  auto golden = load_dataset(kData / "cases/golden").cases;
  cases.insert(cases.end(), golden.rbegin(), golden.rend());
  auto schedules = load_schedules(kData / "schedules/sara_schedules.json");
  TBox t = load_tbox(kData / "reference_tbox.json");
  DeterministicExtractor backend;
  EvalOptions one;
  EvalOptions many;
  many.jobs = 8;
  auto a = to_json(run_eval(cases, t, schedules, backend, one), false).dump();
  auto b = to_json(run_eval(cases, t, schedules, backend, many), false).dump();
  EXPECT_EQ(a, b);
}
