// Command-line front end: TBox validation, extraction, inference, answers,
// dataset evaluation and the refinement pipeline.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>

#include "solar/eval.hpp"
#include "solar/extraction.hpp"
#include "solar/inference.hpp"
#include "solar/pipeline.hpp"
#include "solar/serialization.hpp"
#include "solar/tax.hpp"

#ifndef SOLAR_DEFAULT_DATA_DIR
#define SOLAR_DEFAULT_DATA_DIR "data"
#endif

namespace {

using namespace solar;

struct Globals {
  std::string schedules = std::string(SOLAR_DEFAULT_DATA_DIR) + "/schedules/sara_schedules.json";
  int jobs = 1;
  int max_iter = 10;
  std::size_t max_derived = 100'000;
  int timeout_ms = 10'000;
  std::vector<std::string> precedence;
};

void emit(const Json& j, const std::string& out) {
  if (out.empty()) {
    std::cout << j.dump(2) << '\n';
  } else {
    write_json_file(out, j);
  }
}

InterpreterConfig interpreter_config(const Globals& g) {
  InterpreterConfig config;
  if (g.precedence.empty()) return config;
  config.precedence.clear();
  for (const auto& name : g.precedence) {
    auto status = parse_filing_status(name);
    if (!status) throw Error(ErrorCode::InvalidArgument, "unknown filing status '" + name + "'");
    config.precedence.push_back(*status);
  }
  return config;
}

std::unique_ptr<ExtractorBackend> make_backend(const std::string& name, const Globals& g) {
  if (name == "deterministic") return std::make_unique<DeterministicExtractor>();
  if (name == "http") {
    auto options = HttpExtractorOptions::from_environment();
    options.timeout = std::chrono::milliseconds(g.timeout_ms);
    options.max_parallel = std::max(1, g.jobs);
    return std::make_unique<HttpExtractor>(options);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown backend '" + name + "' (deterministic or http)");
}

CaseText read_case(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  std::filesystem::path p(path);
  if (p.extension() == ".json") {
    Json j = Json::parse(buf.str());
    CaseText c;
    c.id = j.value("id", p.stem().string());
    c.narrative = j.value("narrative", std::string());
    c.question = j.value("question", std::string());
    c.tax_year = parse_tax_year(c.question);
    return c;
  }
  return parse_case(buf.str(), p.stem().string(), p).text;
}

std::vector<TBox> read_fragments(const std::string& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<TBox> out;
  for (const auto& f : files) out.push_back(load_tbox(f));
  return out;
}

int print_findings(const ValidationReport& report) {
  for (const auto& f : report.findings) {
    std::cout << (f.severity == Severity::Error ? "error" : "warning") << ' ' << f.code;
    if (!f.element.empty()) std::cout << " [" << f.element << ']';
    std::cout << ": " << f.message << '\n';
  }
  std::cout << (report.is_valid() ? "valid" : "invalid") << '\n';
  return report.is_valid() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"solar: ontology-driven statutory reasoning"};
  app.set_config("--config", "", "TOML/INI file with defaults for the global options");
  app.require_subcommand(1);
  Globals g;
  app.add_option("--schedules", g.schedules, "Tax schedule file")->capture_default_str();
  app.add_option("--jobs", g.jobs, "Concurrent cases")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--max-iter", g.max_iter, "Pipeline iteration cap")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--max-derived", g.max_derived, "Inference derivation cap")->capture_default_str();
  app.add_option("--timeout-ms", g.timeout_ms, "HTTP extractor timeout")->capture_default_str();
  app.add_option("--precedence", g.precedence, "Filing status order, e.g. SurvivingSpouse MarriedJoint ...")->delimiter(',');

  int code = 0;

  // tbox validate
  auto* tbox_cmd = app.add_subcommand("tbox", "TBox tools")->require_subcommand(1)->fallthrough();
  std::string tbox_file;
  auto* validate_cmd = tbox_cmd->add_subcommand("validate", "Check a TBox for consistency")->fallthrough();
  validate_cmd->add_option("file", tbox_file, "TBox JSON")->required()->check(CLI::ExistingFile);
  validate_cmd->callback([&] { code = print_findings(validate_tbox(load_tbox(tbox_file))); });

  // extract
  std::string case_file, tbox_path, backend_name = "deterministic", out;
  auto* extract_cmd = app.add_subcommand("extract", "Map a case narrative onto the TBox vocabulary")->fallthrough();
  extract_cmd->add_option("--case", case_file, "Case file (SARA text or JSON)")->required()->check(CLI::ExistingFile);
  extract_cmd->add_option("--tbox", tbox_path, "TBox JSON")->required()->check(CLI::ExistingFile);
  extract_cmd->add_option("--backend", backend_name, "deterministic or http")->capture_default_str();
  extract_cmd->add_option("--out", out, "Write the result here instead of stdout");
  extract_cmd->callback([&] {
    TBox tbox = load_tbox(tbox_path);
    auto backend = make_backend(backend_name, g);
    emit(to_json(extract(read_case(case_file), tbox, *backend)), out);
  });

  // infer
  std::string abox_path, trace_path, explain_id;
  auto* infer_cmd = app.add_subcommand("infer", "Apply the TBox rules to an ABox")->fallthrough();
  infer_cmd->add_option("--tbox", tbox_path, "TBox JSON")->required()->check(CLI::ExistingFile);
  infer_cmd->add_option("--abox", abox_path, "ABox JSON")->required()->check(CLI::ExistingFile);
  infer_cmd->add_option("--trace", trace_path, "Write the proof trace here");
  infer_cmd->add_option("--explain", explain_id, "Print the derivation tree of this inferred assertion");
  infer_cmd->add_option("--out", out, "Write the enriched ABox here instead of stdout");
  infer_cmd->callback([&] {
    TBox tbox = load_tbox(tbox_path);
    ABox abox = load_abox(abox_path, &tbox);
    InferenceOptions options;
    options.max_derived = g.max_derived;
    InferenceResult result = infer(tbox, abox, options);
    if (!trace_path.empty()) write_json_file(trace_path, to_json(result.trace));
    if (!explain_id.empty()) {
      std::cout << render(explain(explain_id, result.trace));
      return;
    }
    emit(to_json(merge(abox, result.inferred, tbox)), out);
  });

  // answer
  int year = 0;
  std::string subject;
  auto* answer_cmd = app.add_subcommand("answer", "Compute the tax liability for an ABox")->fallthrough();
  answer_cmd->add_option("--tbox", tbox_path, "TBox JSON")->required()->check(CLI::ExistingFile);
  answer_cmd->add_option("--abox", abox_path, "ABox JSON (inference is applied first)")->required()->check(CLI::ExistingFile);
  answer_cmd->add_option("--year", year, "Tax year")->required();
  answer_cmd->add_option("--subject", subject, "Individual whose tax is computed");
  answer_cmd->callback([&] {
    TBox tbox = load_tbox(tbox_path);
    ABox abox = load_abox(abox_path, &tbox);
    auto schedules = load_schedules(g.schedules);
    InferenceOptions options;
    options.max_derived = g.max_derived;
    ABox enriched = merge(abox, infer(tbox, abox, options).inferred, tbox);
    InterpreterConfig config = interpreter_config(g);
    if (!subject.empty()) config.subject = subject;
    emit(to_json(compute_tax(enriched, schedules, year, config)), out);
  });

  // eval
  std::string dataset, report_path;
  bool numeric_only = false;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a dataset end to end")->fallthrough();
  eval_cmd->add_option("--dataset", dataset, "Directory of case files")->required()->check(CLI::ExistingDirectory);
  eval_cmd->add_option("--tbox", tbox_path, "TBox JSON")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--backend", backend_name, "deterministic or http")->capture_default_str();
  eval_cmd->add_option("--report", report_path, "Write the JSON report here");
  eval_cmd->add_flag("--numeric-only", numeric_only, "Skip cases whose answer is not a dollar amount");
  eval_cmd->callback([&] {
    TBox tbox = load_tbox(tbox_path);
    auto schedules = load_schedules(g.schedules);
    LoadOptions load;
    load.numeric_only = numeric_only;
    Dataset data = load_dataset(dataset, load);
    auto backend = make_backend(backend_name, g);
    EvalOptions options;
    options.jobs = g.jobs;
    options.interpreter = interpreter_config(g);
    EvalReport report = run_eval(data.cases, tbox, schedules, *backend, options);
    for (const auto& row : report.cases) {
      std::cout << (row.pass ? "PASS " : "FAIL ") << row.id << "  predicted "
                << (row.predicted ? row.predicted->to_string() : std::string("-")) << "  gold " << row.gold.to_string();
      if (row.failure) std::cout << "  " << to_string(row.failure->classification);
      std::cout << '\n';
    }
    if (!data.skipped.empty()) std::cout << "skipped " << data.skipped.size() << " non-numeric case(s)\n";
    std::cout << "accuracy " << report.passed() << '/' << report.cases.size() << '\n';
    if (!report_path.empty()) write_json_file(report_path, to_json(report));
  });

  // pipeline run
  std::string fragments_dir, train_dir, patches_dir = std::string(SOLAR_DEFAULT_DATA_DIR) + "/patches",
                                        out_prefix = "tbox";
  auto* pipeline_cmd = app.add_subcommand("pipeline", "Iterative TBox refinement")->require_subcommand(1)->fallthrough();
  auto* run_cmd = pipeline_cmd->add_subcommand("run", "Integrate fragments and refine against training cases")->fallthrough();
  run_cmd->add_option("--fragments", fragments_dir, "Directory of TBox fragments")->required()->check(CLI::ExistingDirectory);
  run_cmd->add_option("--train", train_dir, "Directory of training cases")->required()->check(CLI::ExistingDirectory);
  run_cmd->add_option("--patches", patches_dir, "Vocabulary patch library")->capture_default_str();
  run_cmd->add_option("--out", out_prefix, "Output prefix; writes <prefix>.v<k>.json and reports")->capture_default_str();
  run_cmd->callback([&] {
    auto fragments = read_fragments(fragments_dir);
    auto schedules = load_schedules(g.schedules);
    Dataset train = load_dataset(train_dir);
    DeterministicExtractor backend;
    PipelineOptions options;
    options.max_iterations = g.max_iter;
    options.jobs = g.jobs;
    options.interpreter = interpreter_config(g);
    options.patches = load_patches(patches_dir);
    PipelineState state = run_pipeline(fragments, train.cases, schedules, backend, options);
    if (auto parent = std::filesystem::path(out_prefix).parent_path(); !parent.empty())
      std::filesystem::create_directories(parent);

    for (const auto& e : state.integration_log) std::cout << "integrate " << e.code << ' ' << e.element << ": " << e.message << '\n';
    for (const auto& p : state.pruned) std::cout << "pruned " << p << '\n';
    for (const auto& r : state.reports) {
      std::cout << "iteration " << r.iteration << " tbox v" << r.tbox_version << ": " << r.passed << '/' << r.total << " passed\n";
      for (const auto& f : r.failures) std::cout << "  " << f.case_id << ' ' << to_string(f.classification) << '\n';
      for (const auto& a : r.applied) std::cout << "  applied " << a << '\n';
      write_json_file(out_prefix + ".report.iter" + std::to_string(r.iteration) + ".json", to_json(r));
    }
    for (const auto& v : state.versions) write_json_file(out_prefix + ".v" + std::to_string(v.version) + ".json", to_json(v));
    Json transitions = Json::array();
    for (const auto& t : state.transitions)
      transitions.push_back({{"from", to_string(t.from)}, {"to", to_string(t.to)}, {"iteration", t.iteration}});
    write_json_file(out_prefix + ".transitions.json", transitions);
    std::cout << to_string(state.status) << " after " << state.iteration << " iteration(s), tbox v" << state.tbox.version << '\n';
    code = state.status == PipelineStatus::Converged ? 0 : 1;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const StratificationError& e) {
    std::cerr << "error: NOT_STRATIFIABLE: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return code;
}
