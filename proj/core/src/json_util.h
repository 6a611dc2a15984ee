#pragma once

// Private JSON helpers shared by the readers and writers in core/src.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "framecrf/error.h"
#include "json.hpp"

namespace framecrf::detail {

using nlohmann::json;

std::string read_file(const std::filesystem::path& path);
// Writes to a sibling temp file and renames it into place.
void write_file(const std::filesystem::path& path, std::string_view bytes);

// Parses `text`, rejecting objects that repeat a key. The offending key is
// reported through ValidationError(kDuplicate).
json parse_strict(std::string_view text, const std::string& where);

inline const json& require(const json& obj, const char* key,
                           const std::string& where) {
  if (!obj.is_object()) {
    throw ValidationError(Violation::kMalformed, where, "expected a JSON object");
  }
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw ValidationError(Violation::kMalformed, where,
                          std::string("missing field \"") + key + "\"");
  }
  return *it;
}

inline std::string require_string(const json& obj, const char* key,
                                  const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_string()) {
    throw ValidationError(Violation::kMalformed, where,
                          std::string("field \"") + key + "\" must be a string");
  }
  return v.get<std::string>();
}

inline long long require_int(const json& obj, const char* key,
                             const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_number_integer()) {
    throw ValidationError(Violation::kMalformed, where,
                          std::string("field \"") + key + "\" must be an integer");
  }
  return v.get<long long>();
}

inline const json& require_array(const json& obj, const char* key,
                                 const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_array()) {
    throw ValidationError(Violation::kMalformed, where,
                          std::string("field \"") + key + "\" must be an array");
  }
  return v;
}

}  // namespace framecrf::detail
