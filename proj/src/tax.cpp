#include "solar/tax.hpp"

#include <algorithm>
#include <set>

namespace solar {

std::string_view to_string(FilingStatus status) {
  switch (status) {
    case FilingStatus::SurvivingSpouse: return "SurvivingSpouse";
    case FilingStatus::HeadOfHousehold: return "HeadOfHousehold";
    case FilingStatus::MarriedJoint: return "MarriedJoint";
    case FilingStatus::MarriedSeparate: return "MarriedSeparate";
    case FilingStatus::Single: return "Single";
  }
  return "Single";
}

std::optional<FilingStatus> parse_filing_status(std::string_view text) {
  for (auto s : {FilingStatus::SurvivingSpouse, FilingStatus::HeadOfHousehold, FilingStatus::MarriedJoint,
                 FilingStatus::MarriedSeparate, FilingStatus::Single}) {
    if (to_string(s) == text) return s;
  }
  return std::nullopt;
}

const BracketTable* TaxScheduleSet::table(int year, FilingStatus status) const {
  auto y = brackets.find(year);
  if (y == brackets.end()) return nullptr;
  auto s = y->second.find(status);
  return s == y->second.end() ? nullptr : &s->second;
}

std::optional<Decimal> TaxScheduleSet::standard_deduction_for(int year, FilingStatus status) const {
  auto y = standard_deduction.find(year);
  if (y == standard_deduction.end()) return std::nullopt;
  auto s = y->second.find(status);
  if (s == y->second.end()) return std::nullopt;
  return s->second;
}

std::optional<Decimal> TaxScheduleSet::exemption_for(int year) const {
  auto y = exemption.find(year);
  if (y == exemption.end()) return std::nullopt;
  return y->second;
}

std::vector<std::string> check_table(const BracketTable& table) {
  std::vector<std::string> problems;
  if (table.empty()) {
    problems.push_back("empty bracket table");
    return problems;
  }
  if (!table.front().lower.is_zero()) problems.push_back("first bracket must start at 0");
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto& b = table[i];
    if (b.rate < Decimal() || b.rate > Decimal::from_integer(1))
      problems.push_back("bracket " + std::to_string(i) + " rate outside [0, 1]");
    if (b.base.is_negative()) problems.push_back("bracket " + std::to_string(i) + " has negative base");
    if (i > 0 && !(table[i - 1].lower < b.lower))
      problems.push_back("bracket " + std::to_string(i) + " lower bound not increasing");
  }
  return problems;
}

namespace {

[[noreturn]] void malformed(const std::string& what) {
  throw Error(ErrorCode::MalformedDocument, "schedules: " + what);
}

int parse_year(const std::string& key) {
  try {
    std::size_t used = 0;
    int year = std::stoi(key, &used);
    if (used != key.size()) malformed("bad year key '" + key + "'");
    return year;
  } catch (const std::logic_error&) {
    malformed("bad year key '" + key + "'");
  }
}

FilingStatus parse_status_key(const std::string& key) {
  auto s = parse_filing_status(key);
  if (!s) malformed("unknown filing status '" + key + "'");
  return *s;
}

Decimal money(const Json& j, const std::string& where) {
  if (!j.is_string()) malformed(where + " must be a decimal string");
  auto d = Decimal::parse(j.get<std::string>());
  if (!d) malformed(where + " is not a decimal: " + j.get<std::string>());
  return *d;
}

std::string cell(std::string_view table, int year, std::optional<FilingStatus> status = {},
                 std::optional<std::size_t> index = {}) {
  std::string out = std::string(table) + "[" + std::to_string(year) + "]";
  if (status) out += "[" + std::string(to_string(*status)) + "]";
  if (index) out += "[" + std::to_string(*index) + "]";
  return out;
}

std::vector<const Assertion*> about(const ABox& abox, std::string_view predicate, const std::string& subject) {
  std::vector<const Assertion*> out;
  for (const auto& a : abox.assertions) {
    if (a.predicate != predicate || a.args.empty()) continue;
    auto ref = std::get_if<IndividualRef>(&a.args[0]);
    if (ref && ref->name == subject) out.push_back(&a);
  }
  return out;
}

std::optional<std::string> individual_arg(const Assertion& a, std::size_t pos) {
  if (a.args.size() <= pos) return std::nullopt;
  auto ref = std::get_if<IndividualRef>(&a.args[pos]);
  if (!ref) return std::nullopt;
  return ref->name;
}

struct SpouseLink {
  std::string name;
  std::string assertion_id;
};

std::optional<SpouseLink> spouse_of(const ABox& abox, const std::string& subject) {
  for (const auto& a : abox.assertions) {
    if (a.predicate != vocab::kSpouse) continue;
    auto x = individual_arg(a, 0);
    auto y = individual_arg(a, 1);
    if (x && y && *x == subject) return SpouseLink{*y, a.id};
    if (x && y && *y == subject) return SpouseLink{*x, a.id};
  }
  return std::nullopt;
}

bool is_subject_predicate(std::string_view p) {
  return p == vocab::kGrossIncome || p == vocab::kAdjustedGrossIncome || p == vocab::kItemizedDeduction ||
         p == vocab::kStandardDeduction || p == vocab::kJointReturn || p == vocab::kSurvivingSpouse ||
         p == vocab::kHeadOfHousehold;
}

// Tests a single status for `subject`; fills `basis` when it applies.
bool status_applies(const ABox& abox, const std::string& subject, FilingStatus status,
                    std::vector<std::string>& basis) {
  auto first_id = [&](std::string_view predicate) -> std::optional<std::string> {
    auto found = about(abox, predicate, subject);
    if (found.empty()) return std::nullopt;
    return found.front()->id;
  };
  auto joint = [&]() -> std::optional<std::vector<std::string>> {
    auto files = first_id(vocab::kJointReturn);
    auto spouse = spouse_of(abox, subject);
    if (!files || !spouse) return std::nullopt;
    return std::vector<std::string>{*files, spouse->assertion_id};
  };
  switch (status) {
    case FilingStatus::SurvivingSpouse:
      if (auto id = first_id(vocab::kSurvivingSpouse)) {
        basis = {*id};
        return true;
      }
      return false;
    case FilingStatus::MarriedJoint:
      if (auto ids = joint()) {
        basis = *ids;
        return true;
      }
      return false;
    case FilingStatus::MarriedSeparate:
      if (auto id = first_id(vocab::kMarried); id && !joint()) {
        basis = {*id};
        return true;
      }
      return false;
    case FilingStatus::HeadOfHousehold:
      if (auto id = first_id(vocab::kHeadOfHousehold)) {
        basis = {*id};
        return true;
      }
      return false;
    case FilingStatus::Single:
      if (auto id = first_id(vocab::kUnmarried)) {
        basis = {*id};
        return true;
      }
      return false;
  }
  return false;
}

}  // namespace

TaxScheduleSet schedules_from_json(const Json& j) {
  if (!j.is_object()) malformed("document must be an object");
  TaxScheduleSet s;
  if (j.contains("brackets")) {
    for (const auto& [year_key, statuses] : j.at("brackets").items()) {
      int year = parse_year(year_key);
      for (const auto& [status_key, rows] : statuses.items()) {
        FilingStatus status = parse_status_key(status_key);
        BracketTable table;
        std::string where = cell("brackets", year, status);
        if (!rows.is_array()) malformed(where + " must be an array");
        for (const auto& row : rows) {
          if (!row.is_object() || !row.contains("lower") || !row.contains("rate") || !row.contains("base"))
            malformed(where + " rows need lower, rate and base");
          table.push_back({money(row.at("lower"), where + ".lower"), money(row.at("rate"), where + ".rate"),
                           money(row.at("base"), where + ".base")});
        }
        if (auto problems = check_table(table); !problems.empty()) malformed(where + ": " + problems.front());
        s.brackets[year][status] = std::move(table);
      }
    }
  }
  if (j.contains("standard_deduction")) {
    for (const auto& [year_key, statuses] : j.at("standard_deduction").items()) {
      int year = parse_year(year_key);
      for (const auto& [status_key, amount] : statuses.items()) {
        FilingStatus status = parse_status_key(status_key);
        s.standard_deduction[year][status] = money(amount, cell("standard_deduction", year, status));
      }
    }
  }
  if (j.contains("exemption")) {
    for (const auto& [year_key, amount] : j.at("exemption").items()) {
      int year = parse_year(year_key);
      s.exemption[year] = money(amount, cell("exemption", year));
    }
  }
  return s;
}

Json to_json(const TaxScheduleSet& s) {
  Json j;
  Json brackets = Json::object();
  for (const auto& [year, statuses] : s.brackets) {
    Json by_status = Json::object();
    for (const auto& [status, table] : statuses) {
      Json rows = Json::array();
      for (const auto& b : table) {
        rows.push_back(Json{{"lower", b.lower.to_string()}, {"rate", b.rate.to_string()}, {"base", b.base.to_string()}});
      }
      by_status[std::string(to_string(status))] = std::move(rows);
    }
    brackets[std::to_string(year)] = std::move(by_status);
  }
  j["brackets"] = std::move(brackets);
  Json std_ded = Json::object();
  for (const auto& [year, statuses] : s.standard_deduction) {
    Json by_status = Json::object();
    for (const auto& [status, amount] : statuses) by_status[std::string(to_string(status))] = amount.to_string();
    std_ded[std::to_string(year)] = std::move(by_status);
  }
  j["standard_deduction"] = std::move(std_ded);
  Json ex = Json::object();
  for (const auto& [year, amount] : s.exemption) ex[std::to_string(year)] = amount.to_string();
  j["exemption"] = std::move(ex);
  return j;
}

TaxScheduleSet load_schedules(const std::filesystem::path& path) { return schedules_from_json(read_json_file(path)); }

BracketResult evaluate_brackets(Decimal taxable, const BracketTable& table) {
  if (table.empty()) throw Error(ErrorCode::InvalidArgument, "empty bracket table");
  std::size_t index = 0;
  for (std::size_t i = 0; i < table.size(); ++i)
    if (table[i].lower <= taxable) index = i;
  const Bracket& b = table[index];
  return {index, b.base + b.rate * (taxable - b.lower)};
}

Decimal apply_brackets(Decimal taxable, const BracketTable& table) {
  return evaluate_brackets(taxable, table).exact.round_cents();
}

std::string select_subject(const ABox& abox, const std::optional<std::string>& designated) {
  if (designated) {
    if (!abox.find_individual(*designated)) {
      throw Error(ErrorCode::InvalidArgument, "designated subject '" + *designated + "' is not in the ABox");
    }
    return *designated;
  }
  std::set<std::string> deceased;
  for (const auto& a : abox.with_predicate(vocab::kDeceasedSpouse))
    if (auto y = individual_arg(*a, 1)) deceased.insert(*y);
  std::set<std::string> candidates;
  for (const auto& a : abox.assertions) {
    if (!is_subject_predicate(a.predicate)) continue;
    if (auto x = individual_arg(a, 0); x && !deceased.count(*x)) candidates.insert(*x);
  }
  if (candidates.empty()) {
    throw Error(ErrorCode::NoIncomeAssertions, "no individual carries income, deduction or status facts");
  }
  if (candidates.size() == 1) return *candidates.begin();
  if (candidates.size() == 2) {
    // Spouses on one joint return form a single computation subject.
    const std::string& x = *candidates.begin();
    const std::string& y = *std::next(candidates.begin());
    auto spouse = spouse_of(abox, x);
    bool x_joint = !about(abox, vocab::kJointReturn, x).empty();
    bool y_joint = !about(abox, vocab::kJointReturn, y).empty();
    if (spouse && spouse->name == y && (x_joint || y_joint)) return x_joint ? x : y;
  }
  std::string names;
  for (const auto& c : candidates) names += (names.empty() ? "" : ", ") + c;
  throw Error(ErrorCode::MultipleTaxpayersAmbiguous, "candidates: " + names);
}

FilingDetermination determine_filing_status(const ABox& abox, const InterpreterConfig& config) {
  FilingDetermination d;
  d.subject = select_subject(abox, config.subject);
  for (FilingStatus status : config.precedence) {
    std::vector<std::string> basis;
    if (status_applies(abox, d.subject, status, basis)) {
      d.status = status;
      d.basis = std::move(basis);
      return d;
    }
  }
  // Nothing applies: Single, resting on everything known about the subject.
  d.status = FilingStatus::Single;
  for (const auto& a : abox.assertions) {
    if (auto x = individual_arg(a, 0); x && *x == d.subject) d.basis.push_back(a.id);
  }
  return d;
}

const LogStep* ComputationLog::find(std::string_view label) const {
  for (const auto& s : steps)
    if (s.label == label) return &s;
  return nullptr;
}

TaxComputation compute_tax(const ABox& abox, const TaxScheduleSet& schedules, int tax_year,
                           const InterpreterConfig& config) {
  TaxComputation out;
  out.filing = determine_filing_status(abox, config);
  const std::string& subject = out.filing.subject;
  const FilingStatus status = out.filing.status;
  out.log.steps.push_back({"filing_status", {}, Decimal(), out.filing.basis});

  std::vector<std::string> members{subject};
  std::optional<SpouseLink> spouse = spouse_of(abox, subject);
  const bool combined = status == FilingStatus::MarriedJoint || status == FilingStatus::SurvivingSpouse;
  if (combined && spouse) members.push_back(spouse->name);

  auto collect = [&](std::initializer_list<std::string_view> predicates, LogStep& step) {
    Decimal total;
    for (const auto& m : members) {
      for (auto p : predicates) {
        for (const Assertion* a : about(abox, p, m)) {
          if (a->args.size() < 2) continue;
          auto lit = std::get_if<Literal>(&a->args[1]);
          auto value = lit ? lit->numeric() : std::nullopt;
          if (!value) continue;
          step.inputs.push_back(*value);
          step.provenance.push_back(a->id);
          total += *value;
        }
      }
    }
    step.output = total;
    return total;
  };

  LogStep income{"gross_income", {}, Decimal(), {}};
  out.gross_income = collect({vocab::kGrossIncome, vocab::kAdjustedGrossIncome}, income);
  if (income.provenance.empty()) {
    throw Error(ErrorCode::NoIncomeAssertions, "no income assertions for " + subject);
  }
  if (combined && spouse) income.provenance.push_back(spouse->assertion_id);
  out.log.steps.push_back(std::move(income));

  LogStep deduction{"deduction", {}, Decimal(), {}};
  std::vector<const Assertion*> elections;
  for (const auto& m : members) {
    auto found = about(abox, vocab::kStandardDeduction, m);
    elections.insert(elections.end(), found.begin(), found.end());
  }
  if (!elections.empty()) {
    auto amount = schedules.standard_deduction_for(tax_year, status);
    if (!amount) {
      throw Error(ErrorCode::MissingSchedule, cell("standard_deduction", tax_year, status));
    }
    deduction.label = "standard_deduction";
    deduction.inputs = {*amount};
    deduction.output = *amount;
    deduction.provenance = {elections.front()->id, cell("standard_deduction", tax_year, status)};
    out.deduction = *amount;
  } else {
    deduction.label = "itemized_deduction";
    out.deduction = collect({vocab::kItemizedDeduction}, deduction);
  }
  out.log.steps.push_back(std::move(deduction));

  auto per_exemption = schedules.exemption_for(tax_year);
  if (!per_exemption) throw Error(ErrorCode::MissingSchedule, cell("exemption", tax_year));
  LogStep exemptions{"exemptions", {}, Decimal(), {cell("exemption", tax_year)}};
  std::int64_t count = 1;
  if (status == FilingStatus::MarriedJoint && spouse) {
    ++count;
    exemptions.provenance.push_back(spouse->assertion_id);
  }
  std::set<std::string> dependents;
  for (const auto& m : members) {
    for (const Assertion* a : about(abox, vocab::kClaimsDependent, m)) {
      if (auto dep = individual_arg(*a, 1); dep && dependents.insert(*dep).second) {
        ++count;
        exemptions.provenance.push_back(a->id);
      }
    }
  }
  exemptions.inputs = {*per_exemption, Decimal::from_integer(count)};
  exemptions.output = *per_exemption * Decimal::from_integer(count);
  out.exemptions = exemptions.output;
  out.log.steps.push_back(std::move(exemptions));

  Decimal taxable = out.gross_income - out.deduction - out.exemptions;
  if (taxable.is_negative()) taxable = Decimal();
  out.taxable_income = taxable;
  out.log.steps.push_back({"taxable_income", {out.gross_income, out.deduction, out.exemptions}, taxable, {}});

  const BracketTable* table = schedules.table(tax_year, status);
  if (!table) throw Error(ErrorCode::MissingSchedule, cell("brackets", tax_year, status));
  BracketResult bracket = evaluate_brackets(taxable, *table);
  const Bracket& row = (*table)[bracket.index];
  out.log.steps.push_back({"bracket_tax",
                           {taxable, row.lower, row.rate, row.base},
                           bracket.exact,
                           {cell("brackets", tax_year, status, bracket.index)}});
  out.liability = bracket.exact.round_cents();
  out.log.steps.push_back({"total_tax", {bracket.exact}, out.liability, {}});
  return out;
}

std::vector<UsageContract> interpreter_requirements() {
  return {UsageContract{std::string(vocab::kJointReturn),
                        {std::string(vocab::kSpouse)},
                        ContractScope::SameSubject,
                        "joint returns combine spousal income only through an explicit hasSpouse link"}};
}

Json to_json(const TaxComputation& c) {
  Json steps = Json::array();
  for (const auto& s : c.log.steps) {
    Json inputs = Json::array();
    for (const auto& i : s.inputs) inputs.push_back(i.to_string());
    steps.push_back(Json{{"label", s.label},
                         {"inputs", std::move(inputs)},
                         {"output", s.output.to_string()},
                         {"provenance", s.provenance}});
  }
  return Json{{"subject", c.filing.subject},
              {"filing_status", std::string(to_string(c.filing.status))},
              {"filing_basis", c.filing.basis},
              {"gross_income", c.gross_income.to_string()},
              {"deduction", c.deduction.to_string()},
              {"exemptions", c.exemptions.to_string()},
              {"taxable_income", c.taxable_income.to_string()},
              {"liability", c.liability.to_string()},
              {"log", std::move(steps)}};
}

}  // namespace solar
