#pragma once

#include <optional>
#include <string>
#include <vector>

#include "solar/pipeline.hpp"

namespace solar {

struct CaseOutcome {
  std::string id;
  std::optional<Decimal> predicted;
  Decimal gold;
  bool pass = false;
  std::optional<std::string> filing_status;
  std::optional<CaseFailure> failure;
  double wall_ms = 0.0;
};

struct EvalReport {
  std::string backend;
  std::string tbox_id;
  int tbox_version = 0;
  std::vector<CaseOutcome> cases;

  std::size_t passed() const;
  double accuracy() const;
};

struct EvalOptions {
  int jobs = 1;
  InterpreterConfig interpreter;
};

/// extract -> validate -> infer -> compute_tax for every case; failing cases
/// are classified, not thrown. Rows are ordered by case id.
EvalReport run_eval(const std::vector<EvalCase>& cases, const TBox& tbox, const TaxScheduleSet& schedules,
                    ExtractorBackend& backend, const EvalOptions& options = {});

/// `with_timing = false` drops wall times so reports compare byte for byte.
Json to_json(const EvalReport& report, bool with_timing = true);

}  // namespace solar
