#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

namespace lacuna {

using json = nlohmann::json;

// Deterministic text form: keys sorted, floats printed with 17 significant
// digits, arrays of scalars kept on one line.
std::string dump_json(const json& value, bool pretty = true);

std::string sha256_hex(std::string_view data);

// "sha256:<hex>" over the compact canonical dump.
std::string content_hash(const json& value);

json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace lacuna
