#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "lacuna/json_io.hpp"

namespace lacuna {

// Layout under the root:
//   index.json                 key -> {schema, file, window}
//   artifacts/<hex>.json       documents keyed by their content hash
//   windows/<hex>.json         windows keyed by their id
class CertificateStore {
 public:
  explicit CertificateStore(std::filesystem::path root);

  // Stores a document (and the window it refers to, if given) and returns
  // its key. Storing the same document twice is a no-op.
  std::string put(const json& doc, const json* window = nullptr);
  // Loads and re-verifies; throws VerificationFailed if it no longer verifies.
  json get(const std::string& key) const;
  std::vector<std::string> keys() const;
  const json& index() const { return index_; }

 private:
  std::filesystem::path root_;
  json index_;

  std::filesystem::path path_for(const std::string& dir, const std::string& key) const;
  void save_index() const;
};

}  // namespace lacuna
