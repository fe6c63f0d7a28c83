#pragma once

#include <string>
#include <vector>

#include "lacuna/json_io.hpp"

namespace lacuna {

std::vector<std::string> schema_names();
// Name as used in docs/schemas, e.g. "partition_certificate".
const json& schema_for(const std::string& name);
// "lacuna.partition-certificate" -> "partition_certificate"; empty if absent.
std::string schema_name_of(const json& doc);

// Checks the keywords type, required, properties, items, enum, const,
// minimum and minItems. Returns "path: message" strings.
std::vector<std::string> check_schema(const json& doc, const json& schema);

}  // namespace lacuna
