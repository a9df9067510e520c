#pragma once

#include <filesystem>
#include <set>
#include <string>

#include <json.hpp>

#include "solar/ontology.hpp"

namespace solar {

using Json = nlohmann::ordered_json;

/// Arguments serialize as bare strings where unambiguous (`"Alice"`,
/// `"33408.00"`); a literal whose lexical form would read back differently is
/// written as `{"type": "Text", "value": "65"}`, and a reference to an
/// individual missing from `individuals` as `{"individual": "Bob"}`.
Json arg_to_json(const Arg& arg, const std::set<std::string>& individuals);
Arg arg_from_json(const Json& j, const std::set<std::string>& individuals);

Json to_json(const TBox& tbox);
TBox tbox_from_json(const Json& j);

Json to_json(const Assertion& assertion, const std::set<std::string>& individuals);
Assertion assertion_from_json(const Json& j, const std::set<std::string>& individuals,
                              const std::string& fallback_id);

Json to_json(const ABox& abox);
/// With `tbox`, Integer literals in Decimal slots are widened and bare strings
/// in Text slots stay text.
ABox abox_from_json(const Json& j, const TBox* tbox = nullptr);

std::set<std::string> individual_names(const ABox& abox);

Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& j);

TBox load_tbox(const std::filesystem::path& path);
ABox load_abox(const std::filesystem::path& path, const TBox* tbox = nullptr);

}  // namespace solar
