#include "solar/inference.hpp"

#include <algorithm>
#include <optional>
#include <set>

namespace solar {

const ProofStep* ProofTrace::step_for(std::string_view assertion_id) const {
  for (const auto& s : steps)
    if (s.derived == assertion_id) return &s;
  return nullptr;
}

DerivationCapError::DerivationCapError(std::size_t cap, InferenceResult partial)
    : Error(ErrorCode::DerivationCap, "more than " + std::to_string(cap) + " derived facts"),
      partial_(std::move(partial)) {}

namespace {

using Tuple = std::vector<Arg>;
using Relation = std::set<Tuple>;
using Relations = std::map<std::string, Relation, std::less<>>;
using Bindings = std::map<std::string, Arg>;

const Relation kEmpty;

const Relation& relation_of(const Relations& rels, const std::string& predicate) {
  auto it = rels.find(predicate);
  return it == rels.end() ? kEmpty : it->second;
}

Arg ground(const Term& t, const Bindings& b) {
  if (auto v = std::get_if<Variable>(&t)) return b.at(v->name);
  if (auto i = std::get_if<IndividualRef>(&t)) return *i;
  return std::get<Literal>(t);
}

bool term_bound(const Term& t, const Bindings& b) {
  auto v = std::get_if<Variable>(&t);
  return !v || b.count(v->name);
}

bool compare(const Arg& lhs, CompareOp op, const Arg& rhs) {
  auto ll = std::get_if<Literal>(&lhs);
  auto rl = std::get_if<Literal>(&rhs);
  std::optional<std::strong_ordering> ord;
  if (ll && rl) {
    ord = compare_values(*ll, *rl);
  } else if (!ll && !rl) {
    ord = std::get<IndividualRef>(lhs) <=> std::get<IndividualRef>(rhs);
  }
  if (!ord) return op == CompareOp::Ne;
  switch (op) {
    case CompareOp::Eq: return *ord == 0;
    case CompareOp::Ne: return *ord != 0;
    case CompareOp::Lt: return *ord < 0;
    case CompareOp::Le: return *ord <= 0;
    case CompareOp::Gt: return *ord > 0;
    case CompareOp::Ge: return *ord >= 0;
  }
  return false;
}

struct Derivation {
  FactKey fact;
  const Rule* rule;
  Bindings substitution;
  std::vector<FactKey> premises;
};

/// Orders body literals so filters run as soon as their variables are bound.
/// Positive atoms keep source order except that `first` (the delta atom)
/// leads and atoms sharing bound variables are preferred.
std::vector<std::size_t> plan_body(const Rule& rule, std::optional<std::size_t> first) {
  std::vector<std::size_t> order;
  std::vector<bool> placed(rule.body.size(), false);
  std::set<std::string> bound;
  auto bind_atom = [&](std::size_t i) {
    for (const auto& t : std::get<Atom>(rule.body[i]).terms)
      if (auto v = std::get_if<Variable>(&t)) bound.insert(v->name);
    placed[i] = true;
    order.push_back(i);
  };
  auto ready = [&](std::size_t i) {
    auto all_bound = [&](const Term& t) {
      auto v = std::get_if<Variable>(&t);
      return !v || bound.count(v->name);
    };
    if (auto n = std::get_if<Negation>(&rule.body[i]))
      return std::all_of(n->atom.terms.begin(), n->atom.terms.end(), all_bound);
    const auto& c = std::get<Comparison>(rule.body[i]);
    return all_bound(c.lhs) && all_bound(c.rhs);
  };
  auto place_filters = [&] {
    for (std::size_t i = 0; i < rule.body.size(); ++i) {
      if (placed[i] || std::holds_alternative<Atom>(rule.body[i])) continue;
      if (ready(i)) {
        placed[i] = true;
        order.push_back(i);
      }
    }
  };
  if (first) bind_atom(*first);
  place_filters();
  for (;;) {
    std::optional<std::size_t> next;
    for (std::size_t i = 0; i < rule.body.size(); ++i) {
      if (placed[i] || !std::holds_alternative<Atom>(rule.body[i])) continue;
      const auto& atom = std::get<Atom>(rule.body[i]);
      bool shares = std::any_of(atom.terms.begin(), atom.terms.end(), [&](const Term& t) {
        auto v = std::get_if<Variable>(&t);
        return v && bound.count(v->name);
      });
      if (!next) next = i;
      if (shares) {
        next = i;
        break;
      }
    }
    if (!next) break;
    bind_atom(*next);
    place_filters();
  }
  if (order.size() != rule.body.size()) {
    throw Error(ErrorCode::UnboundEvaluation,
                "rule " + rule.id + " has a negation or comparison whose variables are never bound");
  }
  return order;
}

class Evaluator {
 public:
  Evaluator(const Rule& rule, const Relations& full, const Relations* delta,
            std::optional<std::size_t> delta_atom)
      : rule_(rule), full_(full), delta_(delta), delta_atom_(delta_atom), order_(plan_body(rule, delta_atom)) {}

  template <typename Emit>
  void run(Emit&& emit) {
    Bindings b;
    std::vector<std::pair<std::size_t, FactKey>> premises;
    step(0, b, premises, emit);
  }

 private:
  template <typename Emit>
  void step(std::size_t pos, Bindings& b, std::vector<std::pair<std::size_t, FactKey>>& premises, Emit& emit) {
    if (pos == order_.size()) {
      Derivation d;
      d.fact.predicate = rule_.head.predicate;
      for (const auto& t : rule_.head.terms) d.fact.args.push_back(ground(t, b));
      d.rule = &rule_;
      d.substitution = b;
      auto ordered = premises;
      std::sort(ordered.begin(), ordered.end(),
                [](const auto& x, const auto& y) { return x.first < y.first; });
      for (auto& [index, fact] : ordered) d.premises.push_back(std::move(fact));
      emit(std::move(d));
      return;
    }
    const std::size_t index = order_[pos];
    const BodyLiteral& lit = rule_.body[index];
    if (auto atom = std::get_if<Atom>(&lit)) {
      const Relation& rel = (delta_atom_ && *delta_atom_ == index) ? relation_of(*delta_, atom->predicate)
                                                                   : relation_of(full_, atom->predicate);
      for (const Tuple& tuple : rel) {
        if (tuple.size() != atom->terms.size()) continue;
        std::vector<std::string> fresh;
        bool ok = true;
        for (std::size_t k = 0; k < tuple.size() && ok; ++k) {
          const Term& t = atom->terms[k];
          if (auto v = std::get_if<Variable>(&t)) {
            auto it = b.find(v->name);
            if (it == b.end()) {
              b.emplace(v->name, tuple[k]);
              fresh.push_back(v->name);
            } else {
              ok = it->second == tuple[k];
            }
          } else if (auto i = std::get_if<IndividualRef>(&t)) {
            auto ti = std::get_if<IndividualRef>(&tuple[k]);
            ok = ti && *ti == *i;
          } else {
            auto tl = std::get_if<Literal>(&tuple[k]);
            ok = tl && *tl == std::get<Literal>(t);
          }
        }
        if (ok) {
          premises.emplace_back(index, FactKey{atom->predicate, tuple});
          step(pos + 1, b, premises, emit);
          premises.pop_back();
        }
        for (const auto& name : fresh) b.erase(name);
      }
      return;
    }
    if (auto neg = std::get_if<Negation>(&lit)) {
      Tuple tuple;
      for (const auto& t : neg->atom.terms) tuple.push_back(ground(t, b));
      if (!relation_of(full_, neg->atom.predicate).count(tuple)) step(pos + 1, b, premises, emit);
      return;
    }
    const auto& cmp = std::get<Comparison>(lit);
    if (!term_bound(cmp.lhs, b) || !term_bound(cmp.rhs, b)) {
      throw Error(ErrorCode::UnboundEvaluation, "comparison evaluated with unbound operands in " + rule_.id);
    }
    if (compare(ground(cmp.lhs, b), cmp.op, ground(cmp.rhs, b))) step(pos + 1, b, premises, emit);
  }

  const Rule& rule_;
  const Relations& full_;
  const Relations* delta_;
  std::optional<std::size_t> delta_atom_;
  std::vector<std::size_t> order_;
};

class Engine {
 public:
  Engine(const TBox& tbox, const ABox& abox, const InferenceOptions& options)
      : tbox_(tbox), options_(options) {
    for (const auto& a : abox.assertions) {
      used_ids_.insert(a.id);
      if (ids_.emplace(a.key(), a.id).second) {
        full_[a.predicate].insert(a.args);
        by_id_.emplace(a.id, a);
      }
    }
  }

  InferenceResult run() {
    Stratification strat = stratify(tbox_.rules);
    const int strata = static_cast<int>(strat.strata.size());
    for (int level = 0; level < strata; ++level) {
      result_.trace.stratum_boundaries.push_back(result_.trace.steps.size());
      std::vector<const Rule*> rules;
      for (const auto& r : tbox_.rules)
        if (strat.level_of(r.head.predicate) == level) rules.push_back(&r);
      if (rules.empty()) continue;
      std::set<std::string> local;
      for (const auto& p : strat.strata[level]) local.insert(p);

      auto emit = [this](Derivation d) { collect(std::move(d)); };
      Relations delta;
      for (const Rule* r : rules) Evaluator(*r, full_, nullptr, std::nullopt).run(emit);
      delta = commit();
      while (!delta.empty()) {
        for (const Rule* r : rules) {
          for (std::size_t i = 0; i < r->body.size(); ++i) {
            auto atom = std::get_if<Atom>(&r->body[i]);
            if (!atom || !local.count(atom->predicate) || !delta.count(atom->predicate)) continue;
            Evaluator(*r, full_, &delta, i).run(emit);
          }
        }
        delta = commit();
      }
    }
    finish();
    return std::move(result_);
  }

 private:
  void collect(Derivation d) {
    if (ids_.count(d.fact) || !pending_keys_.insert(d.fact).second) return;
    pending_.push_back(std::move(d));
  }

  // Moves this round's derivations into the store and the trace.
  Relations commit() {
    Relations delta;
    for (auto& d : pending_) {
      if (derived_count_ >= options_.max_derived) {
        pending_.clear();
        pending_keys_.clear();
        finish();
        throw DerivationCapError(options_.max_derived, std::move(result_));
      }
      Assertion a;
      a.id = next_id();
      a.predicate = d.fact.predicate;
      a.args = d.fact.args;
      a.source = Source::Inferred;
      a.confidence = 1.0;
      a.explanation = "Inferred by rule " + d.rule->id + (d.rule->description.empty() ? "" : ": " + d.rule->description);

      ProofStep step;
      step.derived = a.id;
      step.rule = d.rule->id;
      step.substitution = std::move(d.substitution);
      for (const auto& p : d.premises) {
        const std::string& pid = ids_.at(p);
        const Assertion& premise = by_id_.at(pid);
        step.premises.push_back(pid);
        step.premise_confidences.push_back(premise.confidence);
        result_.trace.assertions.emplace(pid, premise);
      }
      result_.trace.rules.emplace(d.rule->id, *d.rule);
      result_.trace.steps.push_back(std::move(step));
      result_.trace.assertions.emplace(a.id, a);

      ids_.emplace(d.fact, a.id);
      full_[a.predicate].insert(a.args);
      delta[a.predicate].insert(a.args);
      by_id_.emplace(a.id, a);
      result_.inferred.push_back(std::move(a));
      ++derived_count_;
    }
    pending_.clear();
    pending_keys_.clear();
    return delta;
  }

  void finish() {
    std::sort(result_.inferred.begin(), result_.inferred.end(),
              [](const Assertion& x, const Assertion& y) { return x.key() < y.key(); });
  }

  std::string next_id() {
    std::string id;
    do {
      id = "inf" + std::to_string(++id_counter_);
    } while (used_ids_.count(id));
    used_ids_.insert(id);
    return id;
  }

  const TBox& tbox_;
  InferenceOptions options_;
  Relations full_;
  std::map<FactKey, std::string> ids_;
  std::map<std::string, Assertion> by_id_;
  std::set<std::string> used_ids_;
  std::vector<Derivation> pending_;
  std::set<FactKey> pending_keys_;
  std::size_t derived_count_ = 0;
  std::size_t id_counter_ = 0;
  InferenceResult result_;
};

ExplanationNode build(const std::string& id, const ProofTrace& trace, std::set<std::string>& visiting) {
  ExplanationNode node;
  auto it = trace.assertions.find(id);
  if (it != trace.assertions.end()) node.assertion = it->second;
  node.assertion.id = id;
  const ProofStep* step = trace.step_for(id);
  if (!step || !visiting.insert(id).second) return node;
  node.rule_id = step->rule;
  if (auto r = trace.rules.find(step->rule); r != trace.rules.end()) {
    node.rule_text = print_rule(r->second);
    node.rule_description = r->second.description;
  }
  for (const auto& p : step->premises) node.children.push_back(build(p, trace, visiting));
  visiting.erase(id);
  return node;
}

void render_into(const ExplanationNode& node, int indent, std::string& out) {
  out.append(static_cast<std::size_t>(indent) * 2, ' ');
  out += to_display(node.assertion.key());
  if (!node.rule_id.empty()) {
    out += "  <= rule " + node.rule_id;
    if (!node.rule_description.empty()) out += " (" + node.rule_description + ")";
    if (!node.rule_text.empty()) out += ": " + node.rule_text;
  } else {
    char conf[32];
    std::snprintf(conf, sizeof conf, "%.2f", node.assertion.confidence);
    out += "  [" + std::string(to_string(node.assertion.source)) + ", confidence " + conf + "]";
    if (!node.assertion.explanation.empty()) out += " " + node.assertion.explanation;
  }
  out += '\n';
  for (const auto& c : node.children) render_into(c, indent + 1, out);
}

}  // namespace

InferenceResult infer(const TBox& tbox, const ABox& abox, const InferenceOptions& options) {
  return Engine(tbox, abox, options).run();
}

int ExplanationNode::depth() const {
  int d = 0;
  for (const auto& c : children) d = std::max(d, c.depth() + 1);
  return d;
}

std::size_t ExplanationNode::leaf_count() const {
  if (children.empty()) return 1;
  std::size_t n = 0;
  for (const auto& c : children) n += c.leaf_count();
  return n;
}

ExplanationNode explain(std::string_view assertion_id, const ProofTrace& trace) {
  if (!trace.step_for(assertion_id)) {
    throw Error(ErrorCode::UnknownAssertion, "no derivation for assertion '" + std::string(assertion_id) + "'");
  }
  std::set<std::string> visiting;
  return build(std::string(assertion_id), trace, visiting);
}

std::string render(const ExplanationNode& node) {
  std::string out;
  render_into(node, 0, out);
  return out;
}

namespace {

std::set<std::string> trace_individuals(const ProofTrace& trace) {
  std::set<std::string> names;
  auto add = [&](const Arg& a) {
    if (auto i = std::get_if<IndividualRef>(&a)) names.insert(i->name);
  };
  for (const auto& [id, a] : trace.assertions)
    for (const auto& arg : a.args) add(arg);
  for (const auto& s : trace.steps)
    for (const auto& [v, arg] : s.substitution) add(arg);
  return names;
}

}  // namespace

Json to_json(const ProofTrace& trace) {
  auto names = trace_individuals(trace);
  Json steps = Json::array();
  for (const auto& s : trace.steps) {
    Json sub = Json::object();
    for (const auto& [var, value] : s.substitution) sub[var] = arg_to_json(value, names);
    steps.push_back(Json{{"derived", s.derived},
                         {"rule", s.rule},
                         {"premises", s.premises},
                         {"premise_confidences", s.premise_confidences},
                         {"substitution", std::move(sub)}});
  }
  Json assertions = Json::array();
  for (const auto& [id, a] : trace.assertions) assertions.push_back(to_json(a, names));
  Json rules = Json::array();
  for (const auto& [id, r] : trace.rules) {
    rules.push_back(Json{{"id", id}, {"rule", print_rule(r)}, {"description", r.description}});
  }
  return Json{{"individuals", names},
              {"steps", std::move(steps)},
              {"stratum_boundaries", trace.stratum_boundaries},
              {"assertions", std::move(assertions)},
              {"rules", std::move(rules)}};
}

ProofTrace trace_from_json(const Json& j) {
  ProofTrace trace;
  try {
    auto names = j.at("individuals").get<std::set<std::string>>();
    for (const auto& sj : j.at("steps")) {
      ProofStep s;
      s.derived = sj.at("derived").get<std::string>();
      s.rule = sj.at("rule").get<std::string>();
      s.premises = sj.at("premises").get<std::vector<std::string>>();
      s.premise_confidences = sj.at("premise_confidences").get<std::vector<double>>();
      for (const auto& [var, value] : sj.at("substitution").items()) s.substitution.emplace(var, arg_from_json(value, names));
      trace.steps.push_back(std::move(s));
    }
    trace.stratum_boundaries = j.at("stratum_boundaries").get<std::vector<std::size_t>>();
    for (const auto& aj : j.at("assertions")) {
      Assertion a = assertion_from_json(aj, names, "");
      trace.assertions.emplace(a.id, std::move(a));
    }
    for (const auto& rj : j.at("rules")) {
      Rule r = parse_rule(rj.at("rule").get<std::string>());
      r.id = rj.at("id").get<std::string>();
      r.description = rj.value("description", "");
      trace.rules.emplace(r.id, std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedDocument, std::string("trace: ") + e.what());
  }
  return trace;
}

}  // namespace solar
