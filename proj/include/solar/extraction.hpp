#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <semaphore>
#include <string>
#include <vector>

#include "solar/ontology.hpp"
#include "solar/serialization.hpp"

namespace solar {

struct CaseText {
  std::string id;
  std::string narrative;
  std::string question;
  std::optional<int> tax_year;
};

/// Last four-digit year mentioned in the question, if any.
std::optional<int> parse_tax_year(std::string_view question);
/// Individual named by "How much tax does X have to pay", if any.
std::optional<std::string> parse_question_subject(std::string_view question);

namespace span_reason {
inline constexpr std::string_view kMissingVocabulary = "MISSING_VOCABULARY";
inline constexpr std::string_view kUnrecognized = "UNRECOGNIZED";
inline constexpr std::string_view kSchemaViolation = "SCHEMA_VIOLATION";
}  // namespace span_reason

struct UnmappedSpan {
  std::string text;
  std::string reason;
  std::string detail;
  /// Vocabulary term that was missing, for MISSING_VOCABULARY spans.
  std::string term;
  friend bool operator==(const UnmappedSpan&, const UnmappedSpan&) = default;
};

struct ExtractionResult {
  ABox abox;
  std::vector<UnmappedSpan> unmapped_spans;
  /// Computation subject named by the question.
  std::optional<std::string> subject;

  std::size_t count(std::string_view reason) const;
};

class ExtractorBackend {
 public:
  virtual ~ExtractorBackend() = default;
  virtual std::string name() const = 0;
  virtual ExtractionResult run(const CaseText& text, const TBox& tbox) = 0;
};

/// Runs `backend`, then quarantines every assertion that fails the typing
/// check into unmapped_spans (reason SCHEMA_VIOLATION). The returned ABox
/// always passes validate_abox. Throws Error(InvalidArgument) for an empty
/// narrative and whatever the backend throws.
ExtractionResult extract(const CaseText& text, const TBox& tbox, ExtractorBackend& backend);

/// Template extractor over SARA-style sentences. Deterministic, confidence
/// 1.0, every currency amount either asserted or reported as unmapped.
class DeterministicExtractor final : public ExtractorBackend {
 public:
  std::string name() const override { return "deterministic"; }
  ExtractionResult run(const CaseText& text, const TBox& tbox) override;
};

/// Serves fixed results keyed by case id; cases it does not know fall
/// through to `fallback` when one is given.
class ReplayExtractor final : public ExtractorBackend {
 public:
  explicit ReplayExtractor(std::unique_ptr<ExtractorBackend> fallback = nullptr);
  void add(std::string case_id, ExtractionResult result);
  /// Loads every `<case id>.json` in `dir` (result documents, see to_json).
  void load_directory(const std::filesystem::path& dir, const TBox* tbox = nullptr);

  std::string name() const override { return "replay"; }
  ExtractionResult run(const CaseText& text, const TBox& tbox) override;

 private:
  std::map<std::string, ExtractionResult> results_;
  std::unique_ptr<ExtractorBackend> fallback_;
};

struct HttpExtractorOptions {
  /// Full endpoint, e.g. http://127.0.0.1:8080/extract.
  std::string url;
  std::chrono::milliseconds timeout{10'000};
  int attempts = 3;
  std::chrono::milliseconds initial_backoff{200};
  /// Concurrent requests allowed across all threads using this adapter.
  int max_parallel = 4;

  /// Reads SOLAR_EXTRACTOR_URL; throws Error(BackendUnavailable) when unset.
  static HttpExtractorOptions from_environment();
};

/// Remote extraction service. POSTs {"case", "vocabulary"} and expects
/// {"abox", "unmapped_spans"} back. Transport failures and 5xx replies are
/// retried with exponential backoff; after the last attempt the call throws
/// Error(BackendUnavailable).
class HttpExtractor final : public ExtractorBackend {
 public:
  explicit HttpExtractor(HttpExtractorOptions options);

  std::string name() const override { return "http"; }
  ExtractionResult run(const CaseText& text, const TBox& tbox) override;

 private:
  HttpExtractorOptions options_;
  std::string origin_;
  std::string path_;
  std::counting_semaphore<> slots_;
};

/// Vocabulary summary sent to remote backends: classes, properties and
/// usage contracts, no rules.
Json vocabulary_summary(const TBox& tbox);
Json to_json(const CaseText& text);
Json to_json(const ExtractionResult& result);
ExtractionResult extraction_result_from_json(const Json& j, const TBox* tbox);

}  // namespace solar
