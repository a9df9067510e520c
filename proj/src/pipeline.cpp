#include "solar/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <regex>
#include <set>
#include <thread>

namespace solar {

namespace {

std::string fold(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string camel(std::string_view name, bool upper_first) {
  std::string out;
  bool up = false;
  for (char c : name) {
    if (c == '_' || c == '-' || c == ' ') {
      up = !out.empty();
      continue;
    }
    if (up) {
      out += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      up = false;
    } else {
      out += c;
    }
  }
  if (!out.empty()) {
    auto first = static_cast<unsigned char>(out[0]);
    out[0] = static_cast<char>(upper_first ? std::toupper(first) : std::tolower(first));
  }
  return out;
}

bool same_signature(const PropertyDef& a, const PropertyDef& b) {
  return a.kind == b.kind && a.subject_class == b.subject_class && a.object_class == b.object_class &&
         a.datatype == b.datatype;
}

}  // namespace

std::string canonical_property_name(std::string_view name) { return camel(name, false); }
std::string canonical_class_name(std::string_view name) { return camel(name, true); }

Integration integrate(const std::vector<TBox>& fragments) {
  Integration out;
  TBox& t = out.tbox;
  t.id = fragments.empty() ? "integrated" : fragments.front().id;
  t.version = 1;
  std::map<std::string, std::size_t> classes;
  std::map<std::string, std::size_t> properties;
  // Folded predicate spelling -> name chosen for it, so rules follow the
  // property that won.
  std::map<std::string, std::string> predicate_names;
  auto predicate = [&](const std::string& raw) {
    std::string canon = canonical_property_name(raw);
    auto it = predicate_names.find(fold(canon));
    return it == predicate_names.end() ? canon : it->second;
  };
  auto log = [&](std::string code, std::string element, std::string message) {
    out.log.push_back({std::move(code), std::move(element), std::move(message)});
  };

  for (const auto& f : fragments) {
    for (ClassDef c : f.classes) {
      c.name = canonical_class_name(c.name);
      if (c.parent) c.parent = canonical_class_name(*c.parent);
      auto key = fold(c.name);
      if (auto it = classes.find(key); it != classes.end()) {
        const ClassDef& kept = t.classes[it->second];
        if (kept.parent == c.parent) {
          log("DUPLICATE", kept.name, "class declared again in fragment '" + f.id + "'");
        } else {
          log("CONFLICT", kept.name, "fragment '" + f.id + "' gives a different parent; first declaration kept");
        }
        continue;
      }
      classes.emplace(key, t.classes.size());
      t.classes.push_back(std::move(c));
    }
    for (PropertyDef p : f.properties) {
      p.name = canonical_property_name(p.name);
      p.subject_class = canonical_class_name(p.subject_class);
      if (p.object_class) p.object_class = canonical_class_name(*p.object_class);
      auto key = fold(p.name);
      if (auto it = properties.find(key); it != properties.end()) {
        const PropertyDef& kept = t.properties[it->second];
        if (same_signature(kept, p)) {
          log("DUPLICATE", kept.name, "property declared again in fragment '" + f.id + "'");
        } else {
          log("CONFLICT", kept.name, "fragment '" + f.id + "' gives a different signature; first declaration kept");
        }
        continue;
      }
      properties.emplace(key, t.properties.size());
      predicate_names.emplace(key, p.name);
      t.properties.push_back(std::move(p));
    }
  }

  // Rules and contracts after all vocabulary, so names resolve to the kept spelling.
  std::set<std::string> rule_ids;
  for (const auto& f : fragments) {
    for (Rule r : f.rules) {
      r.head.predicate = predicate(r.head.predicate);
      for (auto& lit : r.body) {
        if (auto a = std::get_if<Atom>(&lit)) a->predicate = predicate(a->predicate);
        if (auto n = std::get_if<Negation>(&lit)) n->atom.predicate = predicate(n->atom.predicate);
      }
      auto dup = std::find_if(t.rules.begin(), t.rules.end(), [&](const Rule& k) { return same_structure(k, r); });
      if (dup != t.rules.end()) {
        log("DUPLICATE", dup->id, "rule repeated in fragment '" + f.id + "'");
        continue;
      }
      if (r.id.empty() || rule_ids.count(r.id)) {
        std::string old = r.id;
        int n = static_cast<int>(t.rules.size()) + 1;
        while (rule_ids.count("r" + std::to_string(n))) ++n;
        r.id = "r" + std::to_string(n);
        if (!old.empty()) log("RULE_ID", r.id, "rule id '" + old + "' already taken");
      }
      rule_ids.insert(r.id);
      t.rules.push_back(std::move(r));
    }
    for (UsageContract c : f.usage_contracts) {
      c.trigger = predicate(c.trigger);
      for (auto& req : c.required) req = predicate(req);
      if (std::find(t.usage_contracts.begin(), t.usage_contracts.end(), c) != t.usage_contracts.end()) {
        log("DUPLICATE", c.trigger, "usage contract repeated in fragment '" + f.id + "'");
        continue;
      }
      t.usage_contracts.push_back(std::move(c));
    }
  }
  return out;
}

std::optional<Decimal> StageTwoResult::answer() const {
  if (computation) return computation->liability;
  return std::nullopt;
}

StageTwoResult run_stage_two(const EvalCase& c, const TBox& tbox, const TaxScheduleSet& schedules,
                             ExtractorBackend& backend, const InterpreterConfig& interpreter) {
  auto start = std::chrono::steady_clock::now();
  StageTwoResult r;
  r.case_id = c.id;
  auto finish = [&] {
    r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return r;
  };
  try {
    r.extraction = extract(c.text, tbox, backend);
    r.validation = validate_abox(r.extraction.abox, tbox);

    std::vector<UsageContract> contracts = tbox.usage_contracts;
    for (auto& req : interpreter_requirements()) {
      bool known = std::any_of(contracts.begin(), contracts.end(), [&](const UsageContract& k) {
        return k.trigger == req.trigger && k.required == req.required && k.scope == req.scope;
      });
      if (!known) contracts.push_back(std::move(req));
    }
    for (const auto& contract : contracts) {
      ValidationReport single;
      check_contracts(r.extraction.abox, {contract}, single);
      if (single.has("USAGE_CONTRACT")) r.unmet_contracts.push_back(contract);
    }

    r.inference = infer(tbox, r.extraction.abox);
    r.enriched = merge(r.extraction.abox, r.inference->inferred, tbox);

    InterpreterConfig config = interpreter;
    if (!config.subject) config.subject = r.extraction.subject;
    if (config.subject && !r.enriched->find_individual(*config.subject)) config.subject.reset();
    r.computation = compute_tax(*r.enriched, schedules, c.tax_year, config);
  } catch (const Error& e) {
    r.error = e.code();
    r.error_message = e.what();
  }
  return finish();
}

std::vector<StageTwoResult> run_stage_two_all(const std::vector<EvalCase>& cases, const TBox& tbox,
                                              const TaxScheduleSet& schedules, ExtractorBackend& backend,
                                              const InterpreterConfig& interpreter, int jobs) {
  std::vector<StageTwoResult> results(cases.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cases.size(); i = next++) {
      results[i] = run_stage_two(cases[i], tbox, schedules, backend, interpreter);
    }
  };
  std::size_t threads = std::min<std::size_t>(std::max(1, jobs), cases.size());
  if (threads <= 1) {
    worker();
    return results;
  }
  std::vector<std::jthread> pool;
  for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
  pool.clear();
  return results;
}

std::string_view to_string(FailureClass c) {
  switch (c) {
    case FailureClass::OntologicalGap: return "OntologicalGap";
    case FailureClass::UsagePatternGap: return "UsagePatternGap";
    case FailureClass::ImplementationError: return "ImplementationError";
    case FailureClass::ExtractionError: return "ExtractionError";
  }
  return "ImplementationError";
}

CaseFailure classify_failure(const EvalCase& c, const StageTwoResult& result) {
  static const std::regex tax_relevant(
      R"(\$|\b(?:married|marriage|spouse|husband|wife|widow|joint|single|unmarried|household|dependent|son|daughter|child|died|deduction|income|paid|earned)\b)",
      std::regex::icase);
  CaseFailure f;
  f.case_id = c.id;
  f.expected = c.gold;
  f.got = result.answer();

  for (const auto& s : result.extraction.unmapped_spans) {
    if (s.reason != span_reason::kMissingVocabulary) continue;
    if (!std::regex_search(s.text, tax_relevant) && !std::regex_search(s.detail, tax_relevant)) continue;
    f.evidence.push_back("MISSING_VOCABULARY: " + s.text);
    if (!s.term.empty() && std::find(f.missing_terms.begin(), f.missing_terms.end(), s.term) == f.missing_terms.end())
      f.missing_terms.push_back(s.term);
  }
  if (!f.evidence.empty()) {
    f.classification = FailureClass::OntologicalGap;
    return f;
  }

  if (!result.unmet_contracts.empty()) {
    for (const auto& k : result.unmet_contracts) {
      std::string req;
      for (const auto& r : k.required) req += (req.empty() ? "" : ", ") + r;
      f.evidence.push_back("USAGE_CONTRACT: " + k.trigger + " requires " + req);
    }
    f.contracts = result.unmet_contracts;
    f.classification = FailureClass::UsagePatternGap;
    return f;
  }

  for (const auto& s : result.extraction.unmapped_spans) {
    if (s.reason == span_reason::kSchemaViolation) f.evidence.push_back("SCHEMA_VIOLATION: " + s.text);
  }
  if (result.error && (*result.error == ErrorCode::BackendUnavailable || *result.error == ErrorCode::NoIncomeAssertions ||
                       *result.error == ErrorCode::MultipleTaxpayersAmbiguous || *result.error == ErrorCode::InvalidArgument)) {
    f.evidence.push_back(std::string(to_string(*result.error)) + ": " + result.error_message);
  }
  if (!f.evidence.empty()) {
    f.classification = FailureClass::ExtractionError;
    return f;
  }

  f.classification = FailureClass::ImplementationError;
  if (result.error) {
    f.evidence.push_back(std::string(to_string(*result.error)) + ": " + result.error_message);
  } else if (result.computation) {
    f.evidence.push_back("filing status " + std::string(to_string(result.computation->filing.status)) + ", liability " +
                         result.computation->liability.to_string() + ", expected " + c.gold.to_string());
  }
  return f;
}

std::string_view to_string(PipelineStatus s) {
  switch (s) {
    case PipelineStatus::Integrating: return "Integrating";
    case PipelineStatus::Validating: return "Validating";
    case PipelineStatus::Evaluating: return "Evaluating";
    case PipelineStatus::Refining: return "Refining";
    case PipelineStatus::Converged: return "Converged";
    case PipelineStatus::Exhausted: return "Exhausted";
  }
  return "Integrating";
}

PatchLibrary load_patches(const std::filesystem::path& dir) {
  PatchLibrary lib;
  if (!std::filesystem::is_directory(dir)) return lib;
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto& file : files) {
    Json j = read_json_file(file);
    // Reuse the TBox reader for the property and class records.
    Json as_tbox = Json::object();
    as_tbox["properties"] = Json::array();
    as_tbox["classes"] = Json::array();
    if (j.contains("properties"))
      for (const auto& [name, body] : j.at("properties").items()) as_tbox["properties"].push_back(body);
    if (j.contains("classes"))
      for (const auto& [name, body] : j.at("classes").items()) as_tbox["classes"].push_back(body);
    TBox t = tbox_from_json(as_tbox);
    for (auto& p : t.properties) lib.properties.emplace(p.name, std::move(p));
    for (auto& c : t.classes) lib.classes.emplace(c.name, std::move(c));
  }
  return lib;
}

namespace {

bool add_class_chain(TBox& tbox, const std::string& name, const PatchLibrary& patches, std::vector<std::string>& applied) {
  if (tbox.find_class(name)) return true;
  auto it = patches.classes.find(name);
  if (it == patches.classes.end()) return false;
  if (it->second.parent && !add_class_chain(tbox, *it->second.parent, patches, applied)) return false;
  tbox.classes.push_back(it->second);
  applied.push_back("class " + name);
  return true;
}

// Removes elements named by validation errors until the TBox validates.
std::vector<std::string> prune_invalid(TBox& tbox) {
  std::vector<std::string> removed;
  for (int pass = 0; pass < 16; ++pass) {
    ValidationReport report = validate_tbox(tbox);
    if (report.is_valid()) return removed;
    std::set<std::string> bad;
    std::set<std::string> cyclic;
    for (const auto& f : report.findings) {
      if (f.severity != Severity::Error) continue;
      if (f.code == "NOT_STRATIFIABLE") {
        std::regex sep(" -> ");
        for (auto it = std::sregex_token_iterator(f.element.begin(), f.element.end(), sep, -1);
             it != std::sregex_token_iterator(); ++it)
          cyclic.insert(it->str());
      } else {
        bad.insert(f.element);
      }
    }
    std::size_t before = removed.size();
    auto erase_rules = [&](auto pred) {
      auto it = std::remove_if(tbox.rules.begin(), tbox.rules.end(), [&](const Rule& r) {
        if (!pred(r)) return false;
        removed.push_back("rule " + r.id);
        return true;
      });
      tbox.rules.erase(it, tbox.rules.end());
    };
    erase_rules([&](const Rule& r) { return bad.count(r.id) || cyclic.count(r.head.predicate); });
    {
      auto it = std::remove_if(tbox.properties.begin(), tbox.properties.end(), [&](const PropertyDef& p) {
        if (!bad.count(p.name)) return false;
        removed.push_back("property " + p.name);
        return true;
      });
      tbox.properties.erase(it, tbox.properties.end());
    }
    {
      auto it = std::remove_if(tbox.classes.begin(), tbox.classes.end(), [&](const ClassDef& c) {
        if (!bad.count(c.name)) return false;
        removed.push_back("class " + c.name);
        return true;
      });
      tbox.classes.erase(it, tbox.classes.end());
    }
    {
      auto it = std::remove_if(tbox.usage_contracts.begin(), tbox.usage_contracts.end(), [&](const UsageContract& c) {
        if (!bad.count(c.trigger)) return false;
        removed.push_back("contract " + c.trigger);
        return true;
      });
      tbox.usage_contracts.erase(it, tbox.usage_contracts.end());
    }
    if (removed.size() == before) break;
  }
  ValidationReport report = validate_tbox(tbox);
  if (!report.is_valid()) {
    throw Error(ErrorCode::InvalidArgument, "TBox fails validation and cannot be pruned: " + report.findings.front().message);
  }
  return removed;
}

}  // namespace

void refine(PipelineState& state, const PatchLibrary& patches) {
  if (state.reports.empty()) state.reports.push_back({});
  IterationReport& report = state.reports.back();
  TBox next = state.tbox;
  std::vector<std::string> applied;

  std::set<std::string> ticketed;
  for (const auto& f : state.failures) {
    switch (f.classification) {
      case FailureClass::OntologicalGap:
        for (const auto& term : f.missing_terms) {
          if (!ticketed.insert(term).second) continue;
          bool done = false;
          if (next.find_property(term) || next.find_class(term)) {
            done = true;
          } else if (auto p = patches.properties.find(term); p != patches.properties.end()) {
            bool classes_ok = add_class_chain(next, p->second.subject_class, patches, applied);
            if (p->second.object_class) classes_ok = classes_ok && add_class_chain(next, *p->second.object_class, patches, applied);
            if (classes_ok) {
              next.properties.push_back(p->second);
              applied.push_back("property " + term);
              done = true;
            }
          } else if (patches.classes.count(term)) {
            done = add_class_chain(next, term, patches, applied);
          }
          report.tickets.push_back("vocabulary " + term + " (case " + f.case_id + "): " +
                                   (done ? "applied from patch library" : "no patch available"));
        }
        break;
      case FailureClass::UsagePatternGap:
        for (const auto& c : f.contracts) {
          if (std::find(next.usage_contracts.begin(), next.usage_contracts.end(), c) != next.usage_contracts.end()) continue;
          next.usage_contracts.push_back(c);
          std::string req;
          for (const auto& r : c.required) req += (req.empty() ? "" : ", ") + r;
          applied.push_back("contract " + c.trigger + " requires " + req);
        }
        break;
      case FailureClass::ImplementationError: {
        std::string msg = "case " + f.case_id + ": expected " + f.expected.to_string() + ", got " +
                          (f.got ? f.got->to_string() : std::string("no answer"));
        for (const auto& e : f.evidence) msg += "; " + e;
        report.bug_reports.push_back(msg);
        break;
      }
      case FailureClass::ExtractionError:
        report.tickets.push_back("extraction review (case " + f.case_id + ")");
        break;
    }
  }

  if (!applied.empty()) {
    next.version = state.tbox.version + 1;
    state.tbox = std::move(next);
    state.versions.push_back(state.tbox);
  }
  report.applied = std::move(applied);
}

PipelineState run_pipeline(const std::vector<TBox>& fragments, const std::vector<EvalCase>& training,
                           const TaxScheduleSet& schedules, ExtractorBackend& backend, const PipelineOptions& options) {
  PipelineState state;
  const int cap = std::max(1, options.max_iterations);
  auto go = [&](PipelineStatus to) {
    state.transitions.push_back({state.status, to, state.iteration});
    state.status = to;
  };

  Integration integration = integrate(fragments);
  state.tbox = std::move(integration.tbox);
  state.integration_log = std::move(integration.log);
  bool last_refine_changed = true;

  go(PipelineStatus::Validating);
  while (true) {
    auto pruned = prune_invalid(state.tbox);
    state.pruned.insert(state.pruned.end(), pruned.begin(), pruned.end());
    if (state.versions.empty() || !(state.versions.back() == state.tbox)) state.versions.push_back(state.tbox);

    go(PipelineStatus::Evaluating);
    ++state.iteration;
    auto results = run_stage_two_all(training, state.tbox, schedules, backend, options.interpreter, options.jobs);
    IterationReport report;
    report.iteration = state.iteration;
    report.tbox_version = state.tbox.version;
    report.total = training.size();
    state.failures.clear();
    for (std::size_t i = 0; i < training.size(); ++i) {
      auto answer = results[i].answer();
      if (answer && within_tolerance(*answer, training[i].gold)) {
        ++report.passed;
        continue;
      }
      state.failures.push_back(classify_failure(training[i], results[i]));
    }
    report.failures = state.failures;
    state.reports.push_back(std::move(report));

    if (state.failures.empty()) {
      go(PipelineStatus::Converged);
      break;
    }
    if (state.iteration >= cap || !last_refine_changed) {
      go(PipelineStatus::Exhausted);
      break;
    }
    go(PipelineStatus::Refining);
    int version = state.tbox.version;
    refine(state, options.patches);
    last_refine_changed = state.tbox.version != version;
    go(PipelineStatus::Validating);
  }
  return state;
}

Json to_json(const CaseFailure& f) {
  Json j{{"case", f.case_id},
         {"expected", f.expected.to_string()},
         {"got", f.got ? Json(f.got->to_string()) : Json(nullptr)},
         {"classification", std::string(to_string(f.classification))},
         {"evidence", f.evidence}};
  return j;
}

Json to_json(const IterationReport& r) {
  Json failures = Json::array();
  for (const auto& f : r.failures) failures.push_back(to_json(f));
  return Json{{"iteration", r.iteration}, {"tbox_version", r.tbox_version}, {"total", r.total},
              {"passed", r.passed},       {"failures", std::move(failures)}, {"applied", r.applied},
              {"tickets", r.tickets},     {"bug_reports", r.bug_reports}};
}

}  // namespace solar
