#include "lacuna/store.hpp"

#include "lacuna/errors.hpp"
#include "lacuna/validate.hpp"

namespace lacuna {
namespace fs = std::filesystem;

CertificateStore::CertificateStore(fs::path root) : root_(std::move(root)) {
  fs::path idx = root_ / "index.json";
  index_ = fs::exists(idx) ? read_json_file(idx) : json{{"version", 1}, {"entries", json::object()}};
  if (!index_.contains("entries") || !index_["entries"].is_object())
    fail(ErrorCode::InvalidInput, "store index is malformed", {{"path", idx.string()}});
}

fs::path CertificateStore::path_for(const std::string& dir, const std::string& key) const {
  std::string hex = key.rfind("sha256:", 0) == 0 ? key.substr(7) : key;
  if (hex.empty() || hex.find_first_not_of("0123456789abcdef") != std::string::npos)
    fail(ErrorCode::InvalidInput, "malformed store key '" + key + "'");
  return root_ / dir / (hex + ".json");
}

void CertificateStore::save_index() const { write_text_file(root_ / "index.json", dump_json(index_)); }

std::string CertificateStore::put(const json& doc, const json* window) {
  std::string key = content_hash(doc);
  json entry = {{"schema", doc.value("schema", std::string())},
                {"file", fs::relative(path_for("artifacts", key), root_).generic_string()}};
  write_text_file(path_for("artifacts", key), dump_json(doc));
  if (window) {
    std::string wid = window->at("id").get<std::string>();
    write_text_file(path_for("windows", wid), dump_json(*window));
    entry["window"] = wid;
  }
  index_["entries"][key] = entry;
  save_index();
  return key;
}

json CertificateStore::get(const std::string& key) const {
  if (!index_["entries"].contains(key)) fail(ErrorCode::DanglingReference, "no stored artifact '" + key + "'");
  const json& entry = index_["entries"][key];
  json doc = read_json_file(root_ / entry.at("file").get<std::string>());
  if (content_hash(doc) != key) fail(ErrorCode::VerificationFailed, "stored artifact does not match its key", {{"key", key}});
  ValidationResult v;
  if (entry.contains("window")) {
    fs::path wp = path_for("windows", entry["window"].get<std::string>());
    if (!fs::exists(wp)) fail(ErrorCode::DanglingReference, "stored window is missing", {{"window", entry["window"]}});
    json w = read_json_file(wp);
    v = validate_document(doc, &w);
  } else {
    v = validate_document(doc);
  }
  if (!v.pass) fail(ErrorCode::VerificationFailed, "stored artifact no longer verifies", v.to_json());
  return doc;
}

std::vector<std::string> CertificateStore::keys() const {
  std::vector<std::string> k;
  for (const auto& [key, v] : index_["entries"].items()) k.push_back(key);
  return k;
}

}  // namespace lacuna
