#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "solar/decimal.hpp"
#include "solar/error.hpp"
#include "solar/extraction.hpp"

namespace solar {

struct EvalCase {
  std::string id;
  CaseText text;
  Decimal gold;
  int tax_year = 0;
};

struct CaseProblem {
  std::filesystem::path file;
  std::string reason;
};

/// Thrown by load_dataset with every file that failed to parse.
class MalformedCaseError : public Error {
 public:
  explicit MalformedCaseError(std::vector<CaseProblem> problems);
  const std::vector<CaseProblem>& problems() const { return problems_; }

 private:
  std::vector<CaseProblem> problems_;
};

/// Parses one case in the SARA text layout: a `% Text` block with the
/// narrative and a `% Question` block whose last token is the `$answer`.
/// Throws MalformedCaseError.
EvalCase parse_case(const std::string& content, const std::string& id, const std::filesystem::path& file = {});

struct LoadOptions {
  /// Skip cases whose answer is not a dollar amount (SARA entailment cases)
  /// instead of reporting them. Skipped files are listed in `skipped`.
  bool numeric_only = false;
};

struct Dataset {
  std::vector<EvalCase> cases;
  std::vector<std::filesystem::path> skipped;
};

/// Loads every `.pl` or `.txt` file in `dir`, sorted by case id.
Dataset load_dataset(const std::filesystem::path& dir, const LoadOptions& options = {});

/// |predicted - gold| <= 10% of |gold|, inclusive; a gold of zero passes
/// when |predicted| <= 0.50.
bool within_tolerance(Decimal predicted, Decimal gold);

}  // namespace solar
