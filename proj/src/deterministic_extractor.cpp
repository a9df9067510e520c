#include <algorithm>
#include <regex>
#include <set>

#include "solar/extraction.hpp"
#include "solar/tax.hpp"

namespace solar {
namespace {

struct Sentence {
  std::string text;
  std::set<std::size_t> consumed;  // offsets of amounts turned into facts
  bool matched = false;
};

struct Amount {
  std::size_t offset;
  std::string text;
  Decimal value;
};

struct Mention {
  std::string name;
  std::size_t offset;
};

struct Pair {
  std::string a;
  std::string b;
  std::size_t sentence;
};

struct Role {
  std::string name;
  std::size_t sentence;
};

struct AmountFact {
  std::string name;
  Amount amount;
  std::size_t sentence;
  bool adjusted = false;
};

const std::set<std::string>& stop_words() {
  static const std::set<std::string> words{
      "In",      "On",      "The",      "He",       "She",     "They",  "His",  "Her",  "Their", "How",
      "After",   "Before",  "During",   "Since",    "For",     "What",  "When", "Also", "Both",  "Each",
      "From",    "Until",   "At",       "As",       "If",      "That",  "This", "There", "It",   "Its",
      "January", "February", "March",   "April",    "May",     "June",  "July", "August", "September",
      "October", "November", "December", "Jan",     "Feb",     "Mar",   "Apr",  "Jun",  "Jul",   "Aug",
      "Sep",     "Sept",    "Oct",      "Nov",      "Dec",     "Monday", "Tuesday", "Wednesday", "Thursday",
      "Friday",  "Saturday", "Sunday"};
  return words;
}

std::vector<Sentence> split_sentences(const std::string& text) {
  std::vector<Sentence> out;
  std::string current;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    current += c;
    bool end = (c == '.' || c == '?' || c == '!') && (i + 1 == text.size() || std::isspace(static_cast<unsigned char>(text[i + 1])));
    if (end) {
      auto first = current.find_first_not_of(" \t\r\n");
      if (first != std::string::npos) out.push_back({current.substr(first), {}, false});
      current.clear();
    }
  }
  auto first = current.find_first_not_of(" \t\r\n");
  if (first != std::string::npos) out.push_back({current.substr(first), {}, false});
  return out;
}

std::vector<Amount> find_amounts(const std::string& s) {
  static const std::regex amount_re(R"(\$\s?(?:\d{1,3}(?:,\d{3})+|\d+)(?:\.\d+)?)");
  std::vector<Amount> out;
  for (auto it = std::sregex_iterator(s.begin(), s.end(), amount_re); it != std::sregex_iterator(); ++it) {
    std::string token = it->str();
    std::string compact;
    for (char c : token)
      if (c != ' ') compact += c;
    if (auto value = parse_currency(compact)) out.push_back({static_cast<std::size_t>(it->position()), token, *value});
  }
  return out;
}

std::vector<Mention> find_names(const std::string& s) {
  static const std::regex name_re(R"(\b[A-Z][a-z]+\b)");
  std::vector<Mention> out;
  for (auto it = std::sregex_iterator(s.begin(), s.end(), name_re); it != std::sregex_iterator(); ++it) {
    if (!stop_words().count(it->str())) out.push_back({it->str(), static_cast<std::size_t>(it->position())});
  }
  return out;
}

std::optional<int> first_year(const std::string& s) {
  static const std::regex year_re(R"(\b(1[89]\d\d|20\d\d)\b)");
  std::smatch m;
  if (std::regex_search(s, m, year_re)) return std::stoi(m[1].str());
  return std::nullopt;
}

class Builder {
 public:
  Builder(const CaseText& text, const TBox& tbox) : text_(text), tbox_(tbox), sentences_(split_sentences(text.narrative)) {}

  ExtractionResult run() {
    for (std::size_t i = 0; i < sentences_.size(); ++i) scan(i);
    assemble();
    for (std::size_t i = 0; i < sentences_.size(); ++i) leftovers(i);
    result_.abox.tbox_id = tbox_.id;
    result_.subject = parse_question_subject(text_.question);
    return std::move(result_);
  }

 private:
  // Names mentioned before `offset`, or the pronoun's referents.
  std::vector<std::string> actors_before(std::size_t sentence, std::size_t offset) {
    const std::string& s = sentences_[sentence].text;
    std::vector<std::string> names;
    for (const auto& m : find_names(s))
      if (m.offset < offset) names.push_back(m.name);
    if (!names.empty()) return names;
    static const std::regex plural(R"(\b(?:They|they|Both|both)\b)");
    static const std::regex singular(R"(\b(?:She|she|He|he)\b)");
    std::string head = s.substr(0, offset);
    if (std::regex_search(head, plural) && !last_group_.empty()) return last_group_;
    if (std::regex_search(head, singular) && !last_subject_.empty()) return {last_subject_};
    return {};
  }

  void person(const std::string& name) {
    if (std::find(persons_.begin(), persons_.end(), name) == persons_.end()) persons_.push_back(name);
  }

  void scan(std::size_t i) {
    Sentence& sent = sentences_[i];
    const std::string& s = sent.text;
    std::smatch m;
    auto mark = [&] { sent.matched = true; };

    static const std::regex marriage1("([A-Z][a-z]+) and ([A-Z][a-z]+) (?:got|were|are|have been|had been) married");
    static const std::regex marriage2("([A-Z][a-z]+) (?:married|marries) ([A-Z][a-z]+)");
    static const std::regex divorce1("([A-Z][a-z]+) and ([A-Z][a-z]+) (?:got|were|are) divorced");
    static const std::regex divorce2("([A-Z][a-z]+) divorced ([A-Z][a-z]+)");
    static const std::regex spouse_mention(R"((?:her|his|their) (?:husband|wife|spouse) ([A-Z][a-z]+))");
    static const std::regex possessive_spouse(R"(([A-Z][a-z]+)'s (?:husband|wife|spouse),? ([A-Z][a-z]+))");
    static const std::regex joint(R"(\bfiles? (?:a |their )?joint (?:tax )?return)");
    static const std::regex child_have(R"(\b(?:have|has|had) a (?:son|daughter|child),? ([A-Z][a-z]+))");
    static const std::regex child_possessive(R"(([A-Z][a-z]+)'s (?:son|daughter|child),? ([A-Z][a-z]+))");
    static const std::regex child_of(R"(([A-Z][a-z]+) is (?:the |a )?(?:son|daughter|child) of ([A-Z][a-z]+)(?: and ([A-Z][a-z]+))?)");
    static const std::regex death(R"(([A-Z][a-z]+) (?:died|passed away))");
    static const std::regex household1(
        R"(([A-Z][a-z]+) lives? (?:at|in) the (?:house|home|household) (?:that|which) ([A-Z][a-z]+) maintains)");
    static const std::regex household2(
        R"(([A-Z][a-z]+) maintains (?:a|the) (?:house|household|home) (?:for|where) (?:(?:her|his|their) (?:son|daughter|child) )?([A-Z][a-z]+))");
    static const std::regex standard(R"(\b(?:takes?|claims?|elects?|uses?) the standard deduction)");
    static const std::regex itemized(R"(\bitemized deductions?\b)");
    static const std::regex unmarried(R"(([A-Z][a-z]+) (?:is|was|remained|remains) (?:single|unmarried|not married))");
    static const std::regex income_word(R"(\b(?:paid|earned|earns|earn|received|receives|made|makes|salary|wages|income)\b)");
    static const std::regex gross_statement(R"(([A-Z][a-z]+)'s (adjusted )?gross income)");
    static const std::regex payer_payee(R"(([A-Z][a-z]+) paid ([A-Z][a-z]+) \$)");

    if (std::regex_search(s, m, marriage1) || std::regex_search(s, m, marriage2)) {
      if (!stop_words().count(m[1].str()) && !stop_words().count(m[2].str())) {
        marriages_.push_back({m[1].str(), m[2].str(), i});
        person(m[1].str());
        person(m[2].str());
        mark();
      }
    }
    if (std::regex_search(s, m, divorce1) || std::regex_search(s, m, divorce2)) {
      divorces_.push_back({m[1].str(), m[2].str(), i});
      person(m[1].str());
      person(m[2].str());
      mark();
    }
    if (std::regex_search(s, m, possessive_spouse)) {
      spouse_mentions_.push_back({m[1].str(), m[2].str(), i});
      person(m[1].str());
      person(m[2].str());
      mark();
    } else if (std::regex_search(s, m, spouse_mention)) {
      auto actors = actors_before(i, static_cast<std::size_t>(m.position(0)));
      if (!actors.empty()) {
        spouse_mentions_.push_back({actors.front(), m[1].str(), i});
        person(actors.front());
        person(m[1].str());
        mark();
      }
    }
    if (std::regex_search(s, m, joint)) {
      for (const auto& a : actors_before(i, static_cast<std::size_t>(m.position(0)))) {
        joint_.push_back({a, i});
        person(a);
      }
      mark();
    }
    if (std::regex_search(s, m, child_possessive)) {
      children_.push_back({m[1].str(), m[2].str(), i});
      person(m[1].str());
      person(m[2].str());
      mark();
    } else if (std::regex_search(s, m, child_of)) {
      for (int g : {2, 3}) {
        if (!m[g].matched) continue;
        children_.push_back({m[g].str(), m[1].str(), i});
        person(m[g].str());
      }
      person(m[1].str());
      mark();
    } else if (std::regex_search(s, m, child_have)) {
      for (const auto& p : actors_before(i, static_cast<std::size_t>(m.position(0)))) {
        children_.push_back({p, m[1].str(), i});
        person(p);
      }
      person(m[1].str());
      mark();
    }
    if (std::regex_search(s, m, death)) {
      std::string rest = m.suffix().str();
      deaths_[m[1].str()] = first_year(rest);
      death_sentence_[m[1].str()] = i;
      person(m[1].str());
      mark();
    }
    if (std::regex_search(s, m, household1)) {
      households_.push_back({m[2].str(), m[1].str(), i});
      person(m[1].str());
      person(m[2].str());
      mark();
    } else if (std::regex_search(s, m, household2)) {
      households_.push_back({m[1].str(), m[2].str(), i});
      person(m[1].str());
      person(m[2].str());
      mark();
    }
    if (std::regex_search(s, m, standard)) {
      for (const auto& a : actors_before(i, static_cast<std::size_t>(m.position(0)))) {
        standard_.push_back({a, i});
        person(a);
      }
      mark();
    }
    if (std::regex_search(s, m, unmarried)) {
      if (!stop_words().count(m[1].str())) {
        unmarried_.push_back({m[1].str(), i});
        person(m[1].str());
        mark();
      }
    }

    auto amounts = find_amounts(s);
    if (!amounts.empty()) {
      if (std::regex_search(s, m, itemized)) {
        auto actors = actors_before(i, static_cast<std::size_t>(m.position(0)));
        if (!actors.empty()) {
          for (const auto& a : amounts) {
            if (a.offset < static_cast<std::size_t>(m.position(0))) continue;
            itemized_.push_back({actors.front(), a, i});
            sent.consumed.insert(a.offset);
          }
          person(actors.front());
          mark();
        }
      } else if (std::regex_search(s, m, gross_statement)) {
        bool adjusted = m[2].matched;
        for (const auto& a : amounts) {
          income_.push_back({m[1].str(), a, i, adjusted});
          sent.consumed.insert(a.offset);
        }
        person(m[1].str());
        mark();
      } else if (std::regex_search(s, m, payer_payee)) {
        for (const auto& a : amounts) {
          income_.push_back({m[2].str(), a, i, false});
          sent.consumed.insert(a.offset);
        }
        person(m[2].str());
        mark();
      } else if (std::regex_search(s, income_word)) {
        auto actors = actors_before(i, amounts.front().offset);
        if (!actors.empty()) {
          for (const auto& a : amounts) {
            income_.push_back({actors.front(), a, i, false});
            sent.consumed.insert(a.offset);
          }
          person(actors.front());
          mark();
        }
      }
    }

    auto names = find_names(s);
    if (!names.empty()) {
      last_subject_ = names.front().name;
      if (names.size() >= 2) {
        last_group_.clear();
        for (const auto& n : names)
          if (std::find(last_group_.begin(), last_group_.end(), n.name) == last_group_.end())
            last_group_.push_back(n.name);
      }
    }
  }

  bool dead_in_year(const std::string& name) const {
    auto it = deaths_.find(name);
    if (it == deaths_.end()) return false;
    if (!it->second || !text_.tax_year) return true;
    return *it->second < *text_.tax_year;
  }

  std::string quote(std::size_t sentence) const { return "\"" + sentences_[sentence].text + "\""; }

  void span(std::string text, std::string_view reason, std::string detail, std::string term = {}) {
    UnmappedSpan sp{std::move(text), std::string(reason), std::move(detail), std::move(term)};
    if (std::find(result_.unmapped_spans.begin(), result_.unmapped_spans.end(), sp) == result_.unmapped_spans.end())
      result_.unmapped_spans.push_back(std::move(sp));
  }

  // Adds an assertion if the TBox has the predicate; otherwise reports the
  // gap. Returns false when the predicate is missing.
  bool emit(std::string_view predicate, std::vector<Arg> args, const std::vector<std::size_t>& sentences,
            const std::string& prefix = "Stated in ", const Amount* amount = nullptr) {
    std::string cited;
    for (auto s : sentences) cited += (cited.empty() ? "" : " and ") + quote(s);
    if (!tbox_.find_property(predicate)) {
      std::string text = amount ? amount->text : sentences_[sentences.front()].text;
      span(text, span_reason::kMissingVocabulary,
           "no property '" + std::string(predicate) + "' to represent " + cited, std::string(predicate));
      return false;
    }
    Assertion a;
    a.predicate = std::string(predicate);
    a.args = std::move(args);
    a.source = Source::Extracted;
    a.confidence = 1.0;
    a.explanation = prefix + cited;
    if (!amount) {
      for (const auto& existing : result_.abox.assertions)
        if (existing.key() == a.key()) return true;
    }
    a.id = "e" + std::to_string(result_.abox.assertions.size() + 1);
    origin_[a.id] = sentences.front();
    result_.abox.assertions.push_back(std::move(a));
    return true;
  }

  static std::vector<Arg> args(const std::string& x) { return {IndividualRef{x}}; }
  static std::vector<Arg> args(const std::string& x, const std::string& y) { return {IndividualRef{x}, IndividualRef{y}}; }
  static std::vector<Arg> args(const std::string& x, Decimal v) { return {IndividualRef{x}, Literal::decimal(v)}; }

  bool has(std::string_view predicate, const std::string& subject) const {
    for (const auto& a : result_.abox.assertions) {
      if (a.predicate != predicate || a.args.empty()) continue;
      if (auto r = std::get_if<IndividualRef>(&a.args[0]); r && r->name == subject) return true;
    }
    return false;
  }

  void assemble() {
    std::set<std::string> dependents;
    for (const auto& c : children_) dependents.insert(c.b);
    for (const auto& h : households_) dependents.insert(h.b);

    auto same_pair = [](const Pair& p, const Pair& q) { return (p.a == q.a && p.b == q.b) || (p.a == q.b && p.b == q.a); };
    std::set<std::string> married;
    for (const auto& m : marriages_) {
      bool divorced = std::any_of(divorces_.begin(), divorces_.end(), [&](const Pair& d) { return same_pair(m, d); });
      if (divorced) continue;
      bool a_dead = dead_in_year(m.a);
      bool b_dead = dead_in_year(m.b);
      if (a_dead != b_dead) {
        const std::string& survivor = a_dead ? m.b : m.a;
        const std::string& deceased = a_dead ? m.a : m.b;
        emit(vocab::kDeceasedSpouse, args(survivor, deceased), {m.sentence, death_sentence_.at(deceased)});
      } else if (!a_dead) {
        emit(vocab::kSpouse, args(m.a, m.b), {m.sentence});
        emit(vocab::kMarried, args(m.a), {m.sentence});
        emit(vocab::kMarried, args(m.b), {m.sentence});
        married.insert(m.a);
        married.insert(m.b);
      }
    }
    for (const auto& m : spouse_mentions_) {
      for (const auto& who : {m.a, m.b}) {
        if (dead_in_year(who)) continue;
        emit(vocab::kMarried, args(who), {m.sentence});
        married.insert(who);
      }
    }
    for (const auto& c : children_) {
      if (!dead_in_year(c.a)) emit(vocab::kClaimsDependent, args(c.a, c.b), {c.sentence});
    }
    for (const auto& h : households_) emit("maintainsHouseholdForDependent", args(h.a, h.b), {h.sentence});
    for (const auto& j : joint_) emit(vocab::kJointReturn, args(j.name), {j.sentence});
    for (const auto& f : income_) {
      auto pred = f.adjusted ? vocab::kAdjustedGrossIncome : vocab::kGrossIncome;
      emit(pred, args(f.name, f.amount.value), {f.sentence}, "Stated in ", &f.amount);
    }
    for (const auto& f : itemized_) {
      emit(vocab::kItemizedDeduction, args(f.name, f.amount.value), {f.sentence}, "Stated in ", &f.amount);
    }
    for (const auto& s : standard_) emit(vocab::kStandardDeduction, args(s.name), {s.sentence});
    for (const auto& u : unmarried_) emit(vocab::kUnmarried, args(u.name), {u.sentence});

    // Individuals: children and household members are dependents.
    for (const auto& p : persons_) {
      std::string cls = dependents.count(p) ? "Dependent" : "Taxpayer";
      if (!tbox_.find_class(cls)) {
        span(p, span_reason::kMissingVocabulary, "no class '" + cls + "' for individual " + p, cls);
        continue;
      }
      result_.abox.individuals.push_back({p, cls});
    }

    // A living taxpayer with no marriage on record is unmarried.
    for (const auto& p : persons_) {
      if (dependents.count(p) || married.count(p) || dead_in_year(p) || has(vocab::kUnmarried, p)) continue;
      std::size_t first = 0;
      for (std::size_t i = 0; i < sentences_.size(); ++i) {
        if (sentences_[i].text.find(p) != std::string::npos) {
          first = i;
          break;
        }
      }
      emit(vocab::kUnmarried, args(p), {first}, "No current marriage stated for " + p + "; first mentioned in ");
    }

    // Without an itemization the standard deduction applies.
    std::set<std::string> itemizers;
    for (const auto& f : itemized_) itemizers.insert(f.name);
    for (const auto& f : income_) {
      if (itemizers.count(f.name) || has(vocab::kStandardDeduction, f.name)) continue;
      emit(vocab::kStandardDeduction, args(f.name), {f.sentence}, "No itemized deductions stated; income given in ");
    }

    complete_contracts();
  }

  // For a trigger fact whose contract is unmet, look for the missing object
  // among the other individuals named in the trigger's sentence.
  void complete_contracts() {
    const std::size_t n = result_.abox.assertions.size();
    for (const auto& contract : tbox_.usage_contracts) {
      if (contract.scope != ContractScope::SameSubject) continue;
      for (std::size_t k = 0; k < n; ++k) {
        const Assertion trigger = result_.abox.assertions[k];
        if (trigger.predicate != contract.trigger || trigger.args.empty()) continue;
        auto subject = std::get_if<IndividualRef>(&trigger.args[0]);
        if (!subject) continue;
        for (const auto& required : contract.required) {
          if (has(required, subject->name)) continue;
          const PropertyDef* prop = tbox_.find_property(required);
          if (!prop || prop->kind != PropertyKind::Object) continue;
          std::size_t sentence = origin_.at(trigger.id);
          for (const auto& m : find_names(sentences_[sentence].text)) {
            if (m.name == subject->name) continue;
            const Individual* ind = result_.abox.find_individual(m.name);
            if (!ind || !tbox_.is_subclass_of(ind->class_name, *prop->object_class)) continue;
            emit(required, args(subject->name, m.name), {sentence},
                 "Completed because " + contract.trigger + " requires " + required + "; from ");
            break;
          }
        }
      }
    }
  }

  void leftovers(std::size_t i) {
    const Sentence& sent = sentences_[i];
    bool reported = false;
    for (const auto& a : find_amounts(sent.text)) {
      if (sent.consumed.count(a.offset)) continue;
      span(a.text, span_reason::kUnrecognized, "amount not covered by any template in " + quote(i));
      reported = true;
    }
    if (!sent.matched && !reported) span(sent.text, span_reason::kUnrecognized, "no template matched");
  }

  const CaseText& text_;
  const TBox& tbox_;
  std::vector<Sentence> sentences_;
  ExtractionResult result_;

  std::vector<std::string> persons_;
  std::string last_subject_;
  std::vector<std::string> last_group_;
  std::vector<Pair> marriages_, divorces_, spouse_mentions_, children_, households_;
  std::vector<Role> joint_, standard_, unmarried_;
  std::vector<AmountFact> income_, itemized_;
  std::map<std::string, std::optional<int>> deaths_;
  std::map<std::string, std::size_t> death_sentence_;
  std::map<std::string, std::size_t> origin_;
};

}  // namespace

ExtractionResult DeterministicExtractor::run(const CaseText& text, const TBox& tbox) {
  CaseText c = text;
  if (!c.tax_year) c.tax_year = parse_tax_year(c.question);
  return Builder(c, tbox).run();
}

}  // namespace solar
