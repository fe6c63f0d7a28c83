#include "lacuna/schema.hpp"

#include <algorithm>
#include <map>

#include "lacuna/errors.hpp"
#include "lacuna/schemas_embedded.hpp"

namespace lacuna {
namespace {

const std::map<std::string, json>& registry() {
  static const std::map<std::string, json> reg = [] {
    std::map<std::string, json> m;
    for (const auto& [name, text] : detail::kEmbeddedSchemas) m.emplace(std::string(name), json::parse(text));
    return m;
  }();
  return reg;
}

bool has_type(const json& v, const std::string& t) {
  if (t == "object") return v.is_object();
  if (t == "array") return v.is_array();
  if (t == "string") return v.is_string();
  if (t == "boolean") return v.is_boolean();
  if (t == "null") return v.is_null();
  if (t == "integer") return v.is_number_integer() || (v.is_number_float() && v.get<double>() == static_cast<double>(static_cast<long long>(v.get<double>())));
  if (t == "number") return v.is_number();
  return false;
}

void walk(const json& v, const json& s, const std::string& path, std::vector<std::string>& out) {
  auto report = [&](const std::string& msg) { out.push_back((path.empty() ? "$" : path) + ": " + msg); };
  if (s.contains("type")) {
    const json& t = s["type"];
    bool ok = false;
    if (t.is_string()) ok = has_type(v, t.get<std::string>());
    else
      for (const auto& x : t) ok = ok || has_type(v, x.get<std::string>());
    if (!ok) {
      report("expected type " + t.dump());
      return;
    }
  }
  if (s.contains("const") && v != s["const"]) report("expected " + s["const"].dump());
  if (s.contains("enum") && std::find(s["enum"].begin(), s["enum"].end(), v) == s["enum"].end())
    report("value not in " + s["enum"].dump());
  if (s.contains("minimum") && v.is_number() && v.get<double>() < s["minimum"].get<double>())
    report("below minimum " + s["minimum"].dump());
  if (v.is_array()) {
    if (s.contains("minItems") && v.size() < s["minItems"].get<std::size_t>())
      report("fewer than " + s["minItems"].dump() + " items");
    if (s.contains("items"))
      for (std::size_t i = 0; i < v.size(); ++i) walk(v[i], s["items"], path + "[" + std::to_string(i) + "]", out);
  }
  if (v.is_object()) {
    if (s.contains("required"))
      for (const auto& k : s["required"])
        if (!v.contains(k.get<std::string>())) report("missing required field '" + k.get<std::string>() + "'");
    if (s.contains("properties"))
      for (const auto& [k, sub] : s["properties"].items())
        if (v.contains(k)) walk(v[k], sub, path + "." + k, out);
  }
}

}  // namespace

std::vector<std::string> schema_names() {
  std::vector<std::string> n;
  for (const auto& [k, v] : registry()) n.push_back(k);
  return n;
}

const json& schema_for(const std::string& name) {
  auto it = registry().find(name);
  if (it == registry().end()) fail(ErrorCode::InvalidInput, "unknown schema '" + name + "'", {{"known", schema_names()}});
  return it->second;
}

std::string schema_name_of(const json& doc) {
  if (!doc.is_object() || !doc.contains("schema") || !doc["schema"].is_string()) return {};
  std::string s = doc["schema"].get<std::string>();
  if (s.rfind("lacuna.", 0) != 0) return {};
  s = s.substr(7);
  std::replace(s.begin(), s.end(), '-', '_');
  return s;
}

std::vector<std::string> check_schema(const json& doc, const json& schema) {
  std::vector<std::string> out;
  walk(doc, schema, "", out);
  return out;
}

}  // namespace lacuna
