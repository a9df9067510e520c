#include "solar/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>

namespace solar {
namespace {

std::string summarize(const std::vector<CaseProblem>& problems) {
  std::string out = std::to_string(problems.size()) + " malformed case file(s)";
  for (const auto& p : problems) out += "\n  " + p.file.string() + ": " + p.reason;
  return out;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Sections keyed by their `% Header` line; body lines lose the leading `%`.
std::map<std::string, std::string> sections(const std::string& content) {
  std::map<std::string, std::string> out;
  std::istringstream in(content);
  std::string line;
  std::string current;
  static const std::regex header(R"(^%\s*(Text|Question|Facts|Test|Answer)\s*$)");
  while (std::getline(in, line)) {
    std::smatch m;
    if (std::regex_match(line, m, header)) {
      current = m[1].str();
      out[current];
      continue;
    }
    if (current.empty()) continue;
    std::string body = line;
    if (!body.empty() && body[0] == '%') {
      body = trim(body.substr(1));
    } else {
      // Prolog facts after the comments end the prose sections.
      if (current == "Text" || current == "Question") current.clear();
      continue;
    }
    if (body.empty()) continue;
    auto& slot = out[current];
    slot += (slot.empty() ? "" : " ") + body;
  }
  return out;
}

}  // namespace

MalformedCaseError::MalformedCaseError(std::vector<CaseProblem> problems)
    : Error(ErrorCode::MalformedCase, summarize(problems)), problems_(std::move(problems)) {}

EvalCase parse_case(const std::string& content, const std::string& id, const std::filesystem::path& file) {
  auto fail = [&](const std::string& reason) -> EvalCase {
    std::filesystem::path where = file.empty() ? std::filesystem::path(id) : file;
    throw MalformedCaseError({CaseProblem{where, reason}});
  };
  auto secs = sections(content);
  if (!secs.count("Text") || secs["Text"].empty()) return fail("missing '% Text' narrative");
  if (!secs.count("Question") || secs["Question"].empty()) return fail("missing '% Question' line");

  std::string question = secs["Question"];
  static const std::regex answer_re(R"(^(.*\S)\s+(\S+)\s*$)");
  std::smatch m;
  if (!std::regex_match(question, m, answer_re)) return fail("question has no trailing answer");
  std::string answer = m[2].str();
  auto gold = parse_currency(answer);
  if (!gold) return fail("answer '" + answer + "' is not a dollar amount");
  if (gold->is_negative()) return fail("answer is negative");

  EvalCase c;
  c.id = id;
  c.gold = *gold;
  c.text.id = id;
  c.text.narrative = secs["Text"];
  c.text.question = m[1].str();
  c.text.tax_year = parse_tax_year(c.text.question);
  if (!c.text.tax_year) return fail("no tax year in question");
  c.tax_year = *c.text.tax_year;
  return c;
}

Dataset load_dataset(const std::filesystem::path& dir, const LoadOptions& options) {
  if (!std::filesystem::is_directory(dir)) {
    throw MalformedCaseError({{dir, "not a directory"}});
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    auto ext = entry.path().extension();
    if (entry.is_regular_file() && (ext == ".pl" || ext == ".txt")) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  Dataset out;
  std::vector<CaseProblem> problems;
  for (const auto& f : files) {
    std::ifstream in(f);
    std::stringstream buf;
    buf << in.rdbuf();
    try {
      out.cases.push_back(parse_case(buf.str(), f.stem().string(), f));
    } catch (const MalformedCaseError& e) {
      bool non_numeric = e.problems().front().reason.find("not a dollar amount") != std::string::npos;
      if (options.numeric_only && non_numeric) {
        out.skipped.push_back(f);
        continue;
      }
      problems.insert(problems.end(), e.problems().begin(), e.problems().end());
    }
  }
  if (!problems.empty()) throw MalformedCaseError(std::move(problems));
  std::sort(out.cases.begin(), out.cases.end(), [](const EvalCase& a, const EvalCase& b) { return a.id < b.id; });
  return out;
}

bool within_tolerance(Decimal predicted, Decimal gold) {
  if (gold.is_zero()) return predicted.abs() <= Decimal::parse_or_throw("0.50");
  return (predicted - gold).abs() <= gold.abs() * Decimal::parse_or_throw("0.1");
}

}  // namespace solar
