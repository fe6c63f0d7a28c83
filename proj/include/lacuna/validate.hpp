#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lacuna/json_io.hpp"

namespace lacuna {

struct ValidationResult {
  bool pass = true;
  std::string schema;
  std::vector<std::string> issues;
  json recomputed = json::object();

  json to_json() const;
};

// Schema check followed by recomputation of every stored constant. Window
// certificates use their embedded window unless one is supplied.
ValidationResult validate_document(const json& doc, const json* window = nullptr);
ValidationResult validate_file(const std::filesystem::path& file,
                               const std::optional<std::filesystem::path>& window = std::nullopt);

}  // namespace lacuna
