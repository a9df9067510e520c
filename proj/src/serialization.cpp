#include "solar/serialization.hpp"

#include <fstream>
#include <sstream>

namespace solar {
namespace {

[[noreturn]] void malformed(const std::string& what) { throw Error(ErrorCode::MalformedDocument, what); }

const Json& require(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) malformed(std::string("missing field '") + key + "'");
  return j.at(key);
}

std::string require_string(const Json& j, const char* key) {
  const Json& v = require(j, key);
  if (!v.is_string()) malformed(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

std::string optional_string(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return {};
  if (!j.at(key).is_string()) malformed(std::string("field '") + key + "' must be a string");
  return j.at(key).get<std::string>();
}

const Json& require_array(const Json& j, const char* key) {
  const Json& v = require(j, key);
  if (!v.is_array()) malformed(std::string("field '") + key + "' must be an array");
  return v;
}

}  // namespace

std::set<std::string> individual_names(const ABox& abox) {
  std::set<std::string> out;
  for (const auto& i : abox.individuals) out.insert(i.name);
  return out;
}

Json arg_to_json(const Arg& arg, const std::set<std::string>& individuals) {
  if (auto ref = std::get_if<IndividualRef>(&arg)) {
    if (individuals.count(ref->name)) return ref->name;
    return Json{{"individual", ref->name}};
  }
  const auto& lit = std::get<Literal>(arg);
  std::string lexical = lit.lexical();
  if (!individuals.count(lexical) && Literal::from_lexical(lexical) == lit) return lexical;
  return Json{{"type", std::string(to_string(lit.type()))}, {"value", lexical}};
}

Arg arg_from_json(const Json& j, const std::set<std::string>& individuals) {
  if (j.is_string()) {
    auto s = j.get<std::string>();
    if (individuals.count(s)) return IndividualRef{s};
    return Literal::from_lexical(s);
  }
  if (j.is_number_integer()) return Literal::integer(j.get<std::int64_t>());
  if (j.is_boolean()) return Literal::boolean(j.get<bool>());
  if (j.is_number_float()) {
    malformed("decimal arguments must be strings to stay exact");
  }
  if (j.is_object()) {
    if (j.contains("individual")) return IndividualRef{require_string(j, "individual")};
    auto type = parse_datatype(require_string(j, "type"));
    if (!type) malformed("unknown literal type '" + require_string(j, "type") + "'");
    std::string value = require_string(j, "value");
    switch (*type) {
      case Datatype::Text: return Literal::text(value);
      case Datatype::Decimal: {
        auto d = Decimal::parse(value);
        if (!d) malformed("bad decimal '" + value + "'");
        return Literal::decimal(*d);
      }
      case Datatype::Integer: {
        auto lit = Literal::from_lexical(value);
        if (lit.type() != Datatype::Integer) malformed("bad integer '" + value + "'");
        return lit;
      }
      case Datatype::Date: {
        auto d = Date::parse(value);
        if (!d) malformed("bad date '" + value + "'");
        return Literal::date(*d);
      }
      case Datatype::Boolean:
        if (value != "true" && value != "false") malformed("bad boolean '" + value + "'");
        return Literal::boolean(value == "true");
    }
  }
  malformed("unsupported argument encoding: " + j.dump());
}

Json to_json(const TBox& tbox) {
  Json j;
  j["id"] = tbox.id;
  j["version"] = tbox.version;
  Json classes = Json::array();
  for (const auto& c : tbox.classes) {
    Json cj{{"name", c.name}};
    if (c.parent) cj["parent"] = *c.parent;
    cj["description"] = c.description;
    classes.push_back(std::move(cj));
  }
  j["classes"] = std::move(classes);
  Json props = Json::array();
  for (const auto& p : tbox.properties) {
    Json pj{{"name", p.name}, {"kind", std::string(to_string(p.kind))}, {"subject_class", p.subject_class}};
    if (p.object_class) pj["object_class"] = *p.object_class;
    if (p.datatype) pj["datatype"] = std::string(to_string(*p.datatype));
    pj["description"] = p.description;
    props.push_back(std::move(pj));
  }
  j["properties"] = std::move(props);
  Json rules = Json::array();
  for (const auto& r : tbox.rules) {
    rules.push_back(Json{{"id", r.id}, {"rule", print_rule(r)}, {"description", r.description}});
  }
  j["rules"] = std::move(rules);
  Json contracts = Json::array();
  for (const auto& c : tbox.usage_contracts) {
    contracts.push_back(Json{{"trigger", c.trigger},
                             {"requires", c.required},
                             {"scope", std::string(to_string(c.scope))},
                             {"message", c.message}});
  }
  j["usage_contracts"] = std::move(contracts);
  return j;
}

TBox tbox_from_json(const Json& j) {
  if (!j.is_object()) malformed("TBox document must be an object");
  TBox t;
  t.id = optional_string(j, "id");
  if (j.contains("version")) {
    if (!j.at("version").is_number_integer()) malformed("field 'version' must be an integer");
    t.version = j.at("version").get<int>();
  }
  if (j.contains("classes")) {
    for (const auto& cj : require_array(j, "classes")) {
      ClassDef c;
      c.name = require_string(cj, "name");
      if (cj.contains("parent") && !cj.at("parent").is_null()) c.parent = require_string(cj, "parent");
      c.description = optional_string(cj, "description");
      t.classes.push_back(std::move(c));
    }
  }
  if (j.contains("properties")) {
    for (const auto& pj : require_array(j, "properties")) {
      PropertyDef p;
      p.name = require_string(pj, "name");
      auto kind = parse_property_kind(require_string(pj, "kind"));
      if (!kind) malformed("unknown property kind for '" + p.name + "'");
      p.kind = *kind;
      p.subject_class = require_string(pj, "subject_class");
      if (pj.contains("object_class")) p.object_class = require_string(pj, "object_class");
      if (pj.contains("datatype")) {
        auto dt = parse_datatype(require_string(pj, "datatype"));
        if (!dt) malformed("unknown datatype for '" + p.name + "'");
        p.datatype = *dt;
      }
      p.description = optional_string(pj, "description");
      t.properties.push_back(std::move(p));
    }
  }
  if (j.contains("rules")) {
    for (const auto& rj : require_array(j, "rules")) {
      Rule r;
      try {
        if (rj.is_string()) {
          r = parse_rule(rj.get<std::string>());
        } else {
          r = parse_rule(require_string(rj, "rule"));
          r.id = optional_string(rj, "id");
          r.description = optional_string(rj, "description");
        }
      } catch (const ParseError& e) {
        malformed(std::string("rule ") + std::to_string(t.rules.size() + 1) + ": " + e.what());
      }
      if (r.id.empty()) r.id = "r" + std::to_string(t.rules.size() + 1);
      t.rules.push_back(std::move(r));
    }
  }
  if (j.contains("usage_contracts")) {
    for (const auto& cj : require_array(j, "usage_contracts")) {
      UsageContract c;
      c.trigger = require_string(cj, "trigger");
      for (const auto& r : require_array(cj, "requires")) {
        if (!r.is_string()) malformed("contract requirements must be predicate names");
        c.required.push_back(r.get<std::string>());
      }
      if (cj.contains("scope")) {
        auto scope = parse_contract_scope(require_string(cj, "scope"));
        if (!scope) malformed("unknown contract scope");
        c.scope = *scope;
      }
      c.message = optional_string(cj, "message");
      t.usage_contracts.push_back(std::move(c));
    }
  }
  return t;
}

Json to_json(const Assertion& a, const std::set<std::string>& individuals) {
  Json args = Json::array();
  for (const auto& arg : a.args) args.push_back(arg_to_json(arg, individuals));
  return Json{{"id", a.id},
              {"predicate", a.predicate},
              {"args", std::move(args)},
              {"source", std::string(to_string(a.source))},
              {"confidence", a.confidence},
              {"explanation", a.explanation}};
}

Assertion assertion_from_json(const Json& j, const std::set<std::string>& individuals,
                              const std::string& fallback_id) {
  Assertion a;
  a.id = optional_string(j, "id");
  if (a.id.empty()) a.id = fallback_id;
  a.predicate = require_string(j, "predicate");
  for (const auto& arg : require_array(j, "args")) a.args.push_back(arg_from_json(arg, individuals));
  if (j.contains("source")) {
    auto src = parse_source(require_string(j, "source"));
    if (!src) malformed("unknown assertion source");
    a.source = *src;
  }
  if (j.contains("confidence")) {
    const Json& c = j.at("confidence");
    if (c.is_number()) {
      a.confidence = c.get<double>();
    } else if (c.is_string()) {
      try {
        a.confidence = std::stod(c.get<std::string>());
      } catch (const std::exception&) {
        malformed("bad confidence");
      }
    } else {
      malformed("bad confidence");
    }
  }
  a.explanation = optional_string(j, "explanation");
  return a;
}

Json to_json(const ABox& abox) {
  Json j;
  j["tbox_id"] = abox.tbox_id;
  Json inds = Json::object();
  for (const auto& i : abox.individuals) inds[i.name] = Json{{"type", i.class_name}};
  j["individuals"] = std::move(inds);
  auto names = individual_names(abox);
  Json assertions = Json::array();
  for (const auto& a : abox.assertions) assertions.push_back(to_json(a, names));
  j["assertions"] = std::move(assertions);
  return j;
}

ABox abox_from_json(const Json& j, const TBox* tbox) {
  if (!j.is_object()) malformed("ABox document must be an object");
  ABox abox;
  abox.tbox_id = optional_string(j, "tbox_id");
  if (j.contains("individuals")) {
    const Json& inds = j.at("individuals");
    if (inds.is_object()) {
      for (const auto& [name, body] : inds.items()) {
        abox.individuals.push_back({name, require_string(body, "type")});
      }
    } else if (inds.is_array()) {
      for (const auto& body : inds) {
        abox.individuals.push_back({require_string(body, "name"), require_string(body, "type")});
      }
    } else {
      malformed("field 'individuals' must be an object or array");
    }
  }
  auto names = individual_names(abox);
  if (j.contains("assertions")) {
    for (const auto& aj : require_array(j, "assertions")) {
      Assertion a = assertion_from_json(aj, names, "a" + std::to_string(abox.assertions.size() + 1));
      if (tbox) {
        const PropertyDef* p = tbox->find_property(a.predicate);
        if (p && p->kind == PropertyKind::Datatype && p->datatype && a.args.size() == 2) {
          if (auto lit = std::get_if<Literal>(&a.args[1])) {
            if (*p->datatype == Datatype::Decimal && lit->type() == Datatype::Integer) {
              a.args[1] = Literal::decimal(*lit->numeric());
            } else if (*p->datatype == Datatype::Text && lit->type() != Datatype::Text) {
              const Json& raw = aj.at("args")[1];
              if (raw.is_string()) a.args[1] = Literal::text(raw.get<std::string>());
            }
          }
        }
      }
      abox.assertions.push_back(std::move(a));
    }
  }
  return abox;
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MalformedDocument, "cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedDocument, path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

TBox load_tbox(const std::filesystem::path& path) { return tbox_from_json(read_json_file(path)); }

// Also accepts the output of `extract`, which wraps the ABox.
ABox load_abox(const std::filesystem::path& path, const TBox* tbox) {
  Json j = read_json_file(path);
  if (j.is_object() && j.contains("abox") && j.at("abox").is_object()) return abox_from_json(j.at("abox"), tbox);
  return abox_from_json(j, tbox);
}

}  // namespace solar
