#include "solar/extraction.hpp"

#include <algorithm>
#include <regex>
#include <set>

namespace solar {

std::optional<int> parse_tax_year(std::string_view question) {
  static const std::regex year_re(R"(\b(1[89]\d\d|20\d\d)\b)");
  std::optional<int> year;
  std::string q(question);
  for (auto it = std::sregex_iterator(q.begin(), q.end(), year_re); it != std::sregex_iterator(); ++it) {
    year = std::stoi((*it)[1].str());
  }
  return year;
}

std::optional<std::string> parse_question_subject(std::string_view question) {
  static const std::regex subject_re(R"(\b(?:does|will|did|must|should)\s+([A-Z][a-z]+)\s+(?:have to\s+)?(?:pay|owe))");
  std::string q(question);
  std::smatch m;
  if (std::regex_search(q, m, subject_re)) return m[1].str();
  return std::nullopt;
}

std::size_t ExtractionResult::count(std::string_view reason) const {
  return static_cast<std::size_t>(
      std::count_if(unmapped_spans.begin(), unmapped_spans.end(), [&](const UnmappedSpan& s) { return s.reason == reason; }));
}

ExtractionResult extract(const CaseText& text, const TBox& tbox, ExtractorBackend& backend) {
  if (text.narrative.find_first_not_of(" \t\r\n") == std::string::npos) {
    throw Error(ErrorCode::InvalidArgument, "case '" + text.id + "' has an empty narrative");
  }
  ExtractionResult raw = backend.run(text, tbox);

  ExtractionResult out;
  out.subject = raw.subject;
  out.unmapped_spans = std::move(raw.unmapped_spans);
  out.abox.tbox_id = tbox.id;

  std::set<std::string> seen;
  for (auto& ind : raw.abox.individuals) {
    if (!tbox.find_class(ind.class_name)) {
      out.unmapped_spans.push_back({ind.name, std::string(span_reason::kSchemaViolation),
                                    "class '" + ind.class_name + "' is not declared", ""});
      continue;
    }
    if (!seen.insert(ind.name).second) {
      out.unmapped_spans.push_back(
          {ind.name, std::string(span_reason::kSchemaViolation), "individual declared more than once", ""});
      continue;
    }
    out.abox.individuals.push_back(std::move(ind));
  }

  std::set<std::string> ids;
  for (auto& a : raw.abox.assertions) {
    ValidationReport report;
    bool ok = check_assertion(a, out.abox, tbox, report);
    if (!(a.confidence >= 0.0 && a.confidence <= 1.0)) {
      report.add(Severity::Error, "CONFIDENCE_RANGE", a.id, "confidence must lie in [0, 1]");
      ok = false;
    }
    if (!ids.insert(a.id).second) {
      report.add(Severity::Error, "DUPLICATE_ASSERTION_ID", a.id, "assertion id used more than once");
      ok = false;
    }
    if (!ok) {
      std::string codes;
      for (const auto& f : report.findings) {
        if (f.severity != Severity::Error) continue;
        codes += (codes.empty() ? "" : ", ") + f.code + ": " + f.message;
      }
      out.unmapped_spans.push_back({to_display(a.key()), std::string(span_reason::kSchemaViolation), codes, ""});
      continue;
    }
    if (a.explanation.empty()) a.explanation = "Reported by the " + backend.name() + " backend";
    a.source = Source::Extracted;
    out.abox.assertions.push_back(std::move(a));
  }
  return out;
}

ReplayExtractor::ReplayExtractor(std::unique_ptr<ExtractorBackend> fallback) : fallback_(std::move(fallback)) {}

void ReplayExtractor::add(std::string case_id, ExtractionResult result) {
  results_[std::move(case_id)] = std::move(result);
}

void ReplayExtractor::load_directory(const std::filesystem::path& dir, const TBox* tbox) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) add(f.stem().string(), extraction_result_from_json(read_json_file(f), tbox));
}

ExtractionResult ReplayExtractor::run(const CaseText& text, const TBox& tbox) {
  auto it = results_.find(text.id);
  if (it != results_.end()) return it->second;
  if (fallback_) return fallback_->run(text, tbox);
  throw Error(ErrorCode::BackendUnavailable, "no recorded extraction for case '" + text.id + "'");
}

Json vocabulary_summary(const TBox& tbox) {
  Json full = to_json(tbox);
  return Json{{"id", tbox.id},
              {"version", tbox.version},
              {"classes", full["classes"]},
              {"properties", full["properties"]},
              {"usage_contracts", full["usage_contracts"]}};
}

Json to_json(const CaseText& text) {
  Json j{{"id", text.id}, {"narrative", text.narrative}, {"question", text.question}};
  j["tax_year"] = text.tax_year ? Json(*text.tax_year) : Json(nullptr);
  return j;
}

Json to_json(const ExtractionResult& result) {
  Json spans = Json::array();
  for (const auto& s : result.unmapped_spans) {
    Json sj{{"text", s.text}, {"reason", s.reason}, {"detail", s.detail}};
    if (!s.term.empty()) sj["term"] = s.term;
    spans.push_back(std::move(sj));
  }
  Json j{{"abox", to_json(result.abox)}, {"unmapped_spans", std::move(spans)}};
  if (result.subject) j["subject"] = *result.subject;
  return j;
}

ExtractionResult extraction_result_from_json(const Json& j, const TBox* tbox) {
  if (!j.is_object() || !j.contains("abox")) {
    throw Error(ErrorCode::MalformedDocument, "extraction result needs an 'abox' field");
  }
  ExtractionResult r;
  r.abox = abox_from_json(j.at("abox"), tbox);
  if (j.contains("unmapped_spans")) {
    if (!j.at("unmapped_spans").is_array()) throw Error(ErrorCode::MalformedDocument, "'unmapped_spans' must be an array");
    for (const auto& s : j.at("unmapped_spans")) {
      if (!s.is_object() || !s.contains("text") || !s.at("text").is_string()) {
        throw Error(ErrorCode::MalformedDocument, "unmapped span needs a 'text' string");
      }
      r.unmapped_spans.push_back({s.at("text").get<std::string>(), s.value("reason", std::string(span_reason::kUnrecognized)),
                                  s.value("detail", std::string()), s.value("term", std::string())});
    }
  }
  if (j.contains("subject") && j.at("subject").is_string()) r.subject = j.at("subject").get<std::string>();
  return r;
}

}  // namespace solar
