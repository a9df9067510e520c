#include "solar/eval.hpp"

#include <algorithm>

namespace solar {

std::size_t EvalReport::passed() const {
  return static_cast<std::size_t>(std::count_if(cases.begin(), cases.end(), [](const CaseOutcome& c) { return c.pass; }));
}

double EvalReport::accuracy() const {
  if (cases.empty()) return 0.0;
  return static_cast<double>(passed()) / static_cast<double>(cases.size());
}

EvalReport run_eval(const std::vector<EvalCase>& cases, const TBox& tbox, const TaxScheduleSet& schedules,
                    ExtractorBackend& backend, const EvalOptions& options) {
  std::vector<EvalCase> ordered = cases;
  std::sort(ordered.begin(), ordered.end(), [](const EvalCase& a, const EvalCase& b) { return a.id < b.id; });
  auto results = run_stage_two_all(ordered, tbox, schedules, backend, options.interpreter, options.jobs);

  EvalReport report;
  report.backend = backend.name();
  report.tbox_id = tbox.id;
  report.tbox_version = tbox.version;
  for (std::size_t i = 0; i < ordered.size(); ++i) {
    CaseOutcome row;
    row.id = ordered[i].id;
    row.gold = ordered[i].gold;
    row.predicted = results[i].answer();
    row.pass = row.predicted && within_tolerance(*row.predicted, row.gold);
    if (results[i].computation) row.filing_status = std::string(to_string(results[i].computation->filing.status));
    if (!row.pass) row.failure = classify_failure(ordered[i], results[i]);
    row.wall_ms = results[i].wall_ms;
    report.cases.push_back(std::move(row));
  }
  return report;
}

Json to_json(const EvalReport& report, bool with_timing) {
  Json rows = Json::array();
  for (const auto& c : report.cases) {
    Json row{{"id", c.id},
             {"predicted", c.predicted ? Json(c.predicted->to_string()) : Json(nullptr)},
             {"gold", c.gold.to_string()},
             {"pass", c.pass},
             {"filing_status", c.filing_status ? Json(*c.filing_status) : Json(nullptr)},
             {"classification", c.failure ? Json(std::string(to_string(c.failure->classification))) : Json(nullptr)},
             {"evidence", c.failure ? Json(c.failure->evidence) : Json::array()}};
    if (with_timing) row["wall_ms"] = c.wall_ms;
    rows.push_back(std::move(row));
  }
  return Json{{"backend", report.backend},
              {"tbox_id", report.tbox_id},
              {"tbox_version", report.tbox_version},
              {"total", report.cases.size()},
              {"passed", report.passed()},
              {"accuracy", report.accuracy()},
              {"cases", std::move(rows)}};
}

}  // namespace solar
